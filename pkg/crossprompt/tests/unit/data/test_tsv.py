import os
import tempfile

from django.test import SimpleTestCase

from crossprompt.app.constants import Split
from crossprompt.app.exceptions import FormatError
from crossprompt.app.data import HashVocabulary, IdVocabulary, load_tsv_dataset, write_tsv_dataset
from crossprompt.app.data.tsv import load_tsv_directory

SIB_HEADER = 'index_id\tcategory\ttext\n'


class TestTsv(SimpleTestCase):
    def setUp(self):
        super().setUp()
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()
        super().tearDown()

    def _write(self, name, content):
        path = os.path.join(self.tmp.name, name)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(content)
        return path

    def test_sib_layout_with_seeded_split(self):
        rows = ''.join(
            f'{index}\t{"science" if index % 2 else "sports"}\tword{index} other words\n'
            for index in range(20)
        )
        path = self._write('eng_Latn.tsv', SIB_HEADER + rows)
        dataset = load_tsv_dataset(path, HashVocabulary(100))
        self.assertEqual(dataset.language, 'eng_Latn')
        self.assertEqual(dataset.label_names, ['sports', 'science'])
        self.assertEqual(dataset.split_sizes(), {'train': 16, 'dev': 2, 'test': 2})
        self.assertEqual(dataset.vocab_size, 102)
        again = load_tsv_dataset(path, HashVocabulary(100))
        self.assertEqual([e.split for e in again.examples], [e.split for e in dataset.examples])

    def test_split_from_file_name(self):
        path = self._write('deu_Latn/dev.tsv', SIB_HEADER + '0\tsports\tein spiel\n')
        dataset = load_tsv_dataset(path)
        self.assertEqual(dataset.language, 'deu_Latn')
        self.assertIs(dataset.examples[0].split, Split.DEV)

    def test_directory_of_splits(self):
        self._write('fra_Latn/train.tsv',
                    SIB_HEADER + '0\tsports\tun match\n1\tscience\tun atome\n')
        self._write('fra_Latn/test.tsv', SIB_HEADER + '0\tscience\tla chimie\n')
        dataset = load_tsv_directory(os.path.join(self.tmp.name, 'fra_Latn'))
        self.assertEqual(dataset.split_sizes(), {'train': 2, 'dev': 0, 'test': 1})
        self.assertEqual(dataset.label_names, ['sports', 'science'])

    def test_fixed_label_inventory(self):
        path = self._write('x.tsv', SIB_HEADER + '0\tpolitics\tvote\n')
        with self.assertRaises(FormatError):
            load_tsv_dataset(path, label_names=['sports', 'science'])

    def test_missing_columns_and_empty(self):
        with self.assertRaises(FormatError):
            load_tsv_dataset(self._write('a.tsv', 'index_id\ttext\n0\thello\n'))
        with self.assertRaises(FormatError):
            load_tsv_dataset(self._write('b.tsv', ''))
        with self.assertRaises(FormatError):
            load_tsv_dataset(self._write('c.tsv', SIB_HEADER))

    def test_ragged_rows(self):
        with self.assertRaises(FormatError):
            load_tsv_dataset(self._write('d.tsv', SIB_HEADER + '0\tsports\n'))
        with self.assertRaises(FormatError):
            load_tsv_dataset(self._write('e.tsv', SIB_HEADER + '0\tsports\ta\tb\n'))

    def test_quote_characters_are_text(self):
        rows = (
            '0\tsports\t"opening quote only\n'
            '1\tscience\tplain words\n'
            '2\tsports\tclosing quote"\n'
            '\n'
            '3\tscience\t""\n'
        )
        vocabulary = HashVocabulary(1000)
        dataset = load_tsv_dataset(self._write('q.tsv', SIB_HEADER + rows), vocabulary)
        self.assertEqual(len(dataset), 4)
        self.assertEqual([e.label for e in dataset.examples], [0, 1, 0, 1])
        self.assertEqual(dataset.examples[0].tokens, vocabulary.encode('"opening quote only'))
        self.assertEqual(dataset.examples[2].tokens, vocabulary.encode('closing quote"'))
        self.assertEqual(dataset.examples[3].tokens, vocabulary.encode('""'))

    def test_write_and_read_ids(self):
        source = self._write('src.tsv', SIB_HEADER + '0\tsports\tgoal\n1\tscience\tatom cell\n')
        vocabulary = IdVocabulary(HashVocabulary(50).vocab_size)
        dataset = load_tsv_dataset(source, HashVocabulary(50))
        path = write_tsv_dataset(dataset, os.path.join(self.tmp.name, 'out', 'src.tsv'),
                                 vocabulary)
        loaded = load_tsv_dataset(path, vocabulary)
        self.assertEqual([e.tokens for e in loaded.examples],
                         [e.tokens for e in dataset.examples])
        self.assertEqual([e.split for e in loaded.examples], [e.split for e in dataset.examples])

    def test_id_vocabulary_bounds(self):
        with self.assertRaises(FormatError):
            IdVocabulary(10).encode('t3 t10')
        with self.assertRaises(FormatError):
            HashVocabulary(10).render((2, 3))
