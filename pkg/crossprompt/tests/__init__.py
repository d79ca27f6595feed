import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'crossprompt.app.settings')
django.setup()
