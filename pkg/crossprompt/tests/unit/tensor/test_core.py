import numpy as np
from django.test import SimpleTestCase

from crossprompt.app.exceptions import ContractError, DimensionError
from crossprompt.app.tensor import Tape, Tensor, backward, float_dtype, ops, precision


class TestTensor(SimpleTestCase):
    def test_storage_is_float32(self):
        tensor = Tensor([[1, 2], [3, 4]], name='w')
        self.assertEqual(tensor.values.dtype, np.float32)
        self.assertEqual(tensor.shape, (2, 2))
        self.assertIsNone(tensor.grad)

    def test_precision_context(self):
        with precision(np.float64):
            self.assertIs(float_dtype(), np.float64)
            self.assertEqual(Tensor([1.0]).values.dtype, np.float64)
        self.assertIs(float_dtype(), np.float32)

    def test_accumulate_grad_sums(self):
        tensor = Tensor(np.zeros(3), trainable=True)
        tensor.accumulate_grad(np.ones(3))
        tensor.accumulate_grad(np.ones(3))
        np.testing.assert_array_equal(tensor.grad, [2, 2, 2])
        tensor.zero_grad()
        self.assertIsNone(tensor.grad)

    def test_accumulate_grad_shape_mismatch(self):
        tensor = Tensor(np.zeros(3), trainable=True)
        with self.assertRaises(DimensionError):
            tensor.accumulate_grad(np.ones(4))

    def test_frozen_tensor_ignores_grad(self):
        tensor = Tensor(np.zeros(3), trainable=True)
        tensor.freeze()
        tensor.accumulate_grad(np.ones(3))
        self.assertIsNone(tensor.grad)


class TestTape(SimpleTestCase):
    def test_no_tape_records_nothing(self):
        w = Tensor(np.ones((2, 2)), trainable=True)
        out = ops.sum_all(ops.matmul(w, w))
        self.assertIsNone(out.producer)

    def test_records_under_active_tape(self):
        w = Tensor(np.ones((2, 2)), trainable=True)
        with Tape() as tape:
            ops.sum_all(ops.matmul(w, w))
        self.assertEqual(tape.ops(), ['matmul', 'sum'])

    def test_inputs_without_gradient_are_not_recorded(self):
        frozen = Tensor(np.ones((2, 2)))
        with Tape() as tape:
            ops.sum_all(ops.matmul(frozen, frozen))
        self.assertEqual(len(tape), 0)

    def test_backward_matmul(self):
        a = Tensor([[1.0, 2.0], [3.0, 4.0]], trainable=True, name='a')
        b = Tensor([[5.0, 6.0], [7.0, 8.0]], name='b')
        with Tape() as tape:
            loss = ops.sum_all(ops.matmul(a, b))
        written = backward(loss, tape)
        self.assertEqual(written, [a])
        np.testing.assert_allclose(a.grad, np.ones((2, 2)) @ b.values.T)
        self.assertIsNone(b.grad)

    def test_frozen_leaves_never_written(self):
        a = Tensor(np.ones((2, 2)), trainable=True)
        b = Tensor(np.ones((2, 2)), trainable=False)
        with Tape() as tape:
            loss = ops.sum_all(ops.mul(a, b))
        backward(loss, tape)
        self.assertIsNotNone(a.grad)
        self.assertIsNone(b.grad)

    def test_shared_input_gradients_accumulate(self):
        a = Tensor([3.0], trainable=True)
        with Tape() as tape:
            loss = ops.sum_all(ops.add(ops.square(a), a))
        backward(loss, tape)
        np.testing.assert_allclose(a.grad, [7.0])

    def test_backward_needs_scalar(self):
        a = Tensor(np.ones(3), trainable=True)
        with Tape() as tape:
            out = ops.scale(a, 2.0)
        with self.assertRaises(ContractError):
            backward(out, tape)

    def test_backward_on_foreign_tape(self):
        a = Tensor(np.ones(3), trainable=True)
        with Tape():
            loss = ops.sum_all(a)
        with Tape() as other:
            pass
        with self.assertRaises(ContractError):
            backward(loss, other)
