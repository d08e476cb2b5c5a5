import numpy as np
import pytest

from punk.kernels import adam, autodiff as ad
from punk.kernels.encoders import (
    BowEncoder,
    ConvTextEncoder,
    EncoderConfig,
    Mlp,
    RnnEncoder,
    make_sequence_encoder,
)
from punk.kernels.params import ParamSet

from conftest import bind_and_check


def rand_loss_vector(rng, dim):
    return ad.Tensor(rng.normal(size=dim))


class TestConv:
    def test_reference_output_dim(self):
        ps = ParamSet(0)
        cfg = EncoderConfig(kind="cnn", widths=[3, 4, 5, 6], kernels_per_width=192)
        enc = ConvTextEncoder(cfg, 768, ps, "c")
        assert enc.out_dim == 768
        assert cfg.out_dim(768) == 768

    def test_hand_max_over_time(self):
        ps = ParamSet(0)
        enc = ConvTextEncoder(EncoderConfig(kind="cnn", widths=[1], kernels_per_width=1),
                              3, ps, "c")
        ps["c.w1"].data = np.array([[1.0], [0.0], [0.0]])
        toks = np.array([[0.2, 5.0, -1.0], [0.9, 0.0, 0.0], [0.1, 2.0, 2.0]])
        out = enc.encode(toks)
        assert out.data == pytest.approx([0.9])

    def test_single_window_no_pooling(self):
        rng = np.random.default_rng(3)
        ps = ParamSet(1)
        enc = ConvTextEncoder(EncoderConfig(kind="cnn", widths=[1], kernels_per_width=4),
                              5, ps, "c")
        x = rng.normal(size=(1, 5))
        expected = np.maximum(x[0] @ ps["c.w1"].data + ps["c.b1"].data, 0)
        assert enc.encode(x).data == pytest.approx(expected)

    def test_short_sequence_zero_padded(self):
        ps = ParamSet(2)
        enc = ConvTextEncoder(EncoderConfig(kind="cnn", widths=[4], kernels_per_width=3),
                              2, ps, "c")
        out = enc.encode(np.ones((2, 2)))
        assert out.data.shape == (3,)

    def test_dim_mismatch(self):
        ps = ParamSet(0)
        enc = ConvTextEncoder(EncoderConfig(kind="cnn", widths=[2], kernels_per_width=2),
                              4, ps, "c")
        with pytest.raises(ValueError, match="dim"):
            enc.encode(np.ones((3, 5)))


class TestRnn:
    def test_output_dim_768(self):
        ps = ParamSet(0)
        enc = RnnEncoder(EncoderConfig(kind="lstm", hidden=384), 16, ps, "r")
        assert enc.out_dim == 768

    def test_zero_params_lstm_outputs_zero(self):
        ps = ParamSet(0)
        enc = RnnEncoder(EncoderConfig(kind="lstm", hidden=3), 2, ps, "r")
        for _k, t in ps.items():
            t.data[:] = 0.0
        out = enc.encode(np.random.default_rng(0).normal(size=(4, 2)))
        assert out.data == pytest.approx(np.zeros(6))

    def test_gru_two_step_hand_trace(self):
        ps = ParamSet(0)
        enc = RnnEncoder(EncoderConfig(kind="gru", hidden=1), 1, ps, "r")
        vals = {"wxz": 0.3, "whz": -0.2, "bz": 0.1, "wxr": 0.5, "whr": 0.4,
                "br": -0.1, "wxn": 1.0, "whn": 0.7, "bn": 0.0}
        for d in ("fw", "bw"):
            for k, v in vals.items():
                ps[f"r.{d}.{k}"].data[:] = v
        x = np.array([[0.5], [-1.0]])

        def sig(v):
            return 1.0 / (1.0 + np.exp(-v))

        def step(xt, h):
            z = sig(vals["wxz"] * xt + vals["whz"] * h + vals["bz"])
            r = sig(vals["wxr"] * xt + vals["whr"] * h + vals["br"])
            n = np.tanh(vals["wxn"] * xt + r * (vals["whn"] * h) + vals["bn"])
            return (1 - z) * n + z * h

        h_fw = step(x[1, 0], step(x[0, 0], 0.0))
        h_bw = step(x[0, 0], step(x[1, 0], 0.0))
        out = enc.encode(x)
        assert out.data == pytest.approx([h_fw, h_bw])

    def test_invalid_hidden(self):
        with pytest.raises(ValueError, match="hidden"):
            RnnEncoder(EncoderConfig(kind="gru", hidden=0), 2, ParamSet(0), "r")


class TestMlp:
    def test_identity_single_layer(self):
        ps = ParamSet(0)
        mlp = Mlp(3, 3, 1, 3, ps, "m")
        ps["m.w0"].data = np.eye(3)
        ps["m.w1"].data = np.eye(3)
        x = np.array([0.5, 2.0, 0.0])
        assert mlp.forward(ad.Tensor(x)).data == pytest.approx(x)

    def test_hidden_shapes_512(self):
        ps = ParamSet(0)
        Mlp(1536, 512, 3, 1, ps, "m")
        assert ps["m.w0"].data.shape == (1536, 512)
        assert ps["m.w1"].data.shape == (512, 512)
        assert ps["m.w2"].data.shape == (512, 512)
        assert ps["m.w3"].data.shape == (512, 1)

    def test_matches_explicit_matmul(self):
        rng = np.random.default_rng(9)
        ps = ParamSet(4)
        mlp = Mlp(6, 5, 2, 3, ps, "m")
        x = rng.normal(size=6)
        h = x
        for i in range(3):
            h = h @ ps[f"m.w{i}"].data + ps[f"m.b{i}"].data
            if i < 2:
                h = np.maximum(h, 0)
        assert mlp.forward(ad.Tensor(x)).data == pytest.approx(h, abs=1e-6)


class TestAdam:
    def test_zero_gradient_no_move(self):
        ps = ParamSet(0)
        ps.add_weight("w", (3, 2))
        before = ps["w"].data.copy()
        ps["w"].grad = np.zeros((3, 2))
        adam.adam_step(ps, adam.AdamState(ps))
        assert ps["w"].data == pytest.approx(before)

    def test_first_step_closed_form(self):
        ps = ParamSet(0)
        ps.add_bias("p", (1,))
        ps["p"].data[:] = 1.0
        ps["p"].grad = np.array([1.0])
        adam.adam_step(ps, adam.AdamState(ps, lr=1e-3))
        assert ps["p"].data[0] == pytest.approx(1.0 - 1e-3 * (1.0 / (1.0 + 1e-8)))

    def test_determinism(self):
        def run():
            ps = ParamSet(5)
            ps.add_weight("w", (4, 4))
            state = adam.AdamState(ps)
            rng = np.random.default_rng(0)
            for _i in range(10):
                ps["w"].grad = rng.normal(size=(4, 4))
                adam.adam_step(ps, state)
            return ps["w"].data.copy()

        assert np.array_equal(run(), run())

    def test_non_finite_gradient_names_parameter(self):
        ps = ParamSet(0)
        ps.add_weight("bad_param", (2, 2))
        ps["bad_param"].grad = np.full((2, 2), np.nan)
        with pytest.raises(FloatingPointError, match="bad_param"):
            adam.adam_step(ps, adam.AdamState(ps))


class TestEncoderDims:
    @pytest.mark.parametrize("kind,expected", [
        ("bow", 10),
        ("cnn", 6),
        ("lstm", 8),
        ("gru", 8),
    ])
    def test_out_dim_formula(self, kind, expected):
        cfg = EncoderConfig(kind=kind, widths=[1, 2], kernels_per_width=3, hidden=4)
        ps = ParamSet(0)
        enc = make_sequence_encoder(cfg, 10, ps, "e")
        assert enc.out_dim == expected == cfg.out_dim(10)


class TestDeterminism:
    def test_forward_deterministic(self):
        rng = np.random.default_rng(0)
        toks = rng.normal(size=(5, 4))
        outs = []
        for _i in range(2):
            ps = ParamSet(11)
            enc = make_sequence_encoder(
                EncoderConfig(kind="cnn", widths=[2, 3], kernels_per_width=3), 4, ps, "e"
            )
            outs.append(enc.encode(toks).data)
        assert np.array_equal(outs[0], outs[1])

    def test_dropout_deterministic_given_seed(self):
        x = ad.Tensor(np.ones(50))
        a = ad.dropout(x, 0.5, np.random.default_rng(3)).data
        b = ad.dropout(ad.Tensor(np.ones(50)), 0.5, np.random.default_rng(3)).data
        assert np.array_equal(a, b)
        assert not np.array_equal(a, np.ones(50))

    def test_dropout_eval_mode_identity(self):
        x = ad.Tensor(np.ones(10))
        assert ad.dropout(x, 0.5, None) is x


class TestGradCheck:
    def test_constant_function_zero_error(self):
        from punk.kernels.gradcheck import grad_check

        err = grad_check(lambda leaves: ad.tsum(ad.mul(leaves["x"],
                                                       ad.Tensor(np.zeros(3)))),
                         {"x": np.ones(3)})
        assert err == 0.0

    def test_linear_sigmoid_bce(self):
        rng = np.random.default_rng(0)
        ps = ParamSet(1)
        ps.add_weight("w", (4, 2))
        ps.add_bias("b", (2,))
        x = rng.normal(size=4)
        y = np.array([1.0, 0.0])

        def loss():
            z = ad.add(ad.matmul(ad.Tensor(x), ps["w"]), ps["b"])
            return ad.bce_with_logits(z, y)

        assert bind_and_check(ps, loss) < 1e-4

    def test_conv_with_sum_head(self):
        rng = np.random.default_rng(2)
        ps = ParamSet(2)
        enc = ConvTextEncoder(EncoderConfig(kind="cnn", widths=[1, 2],
                                            kernels_per_width=3), 4, ps, "c")
        toks = rng.normal(size=(5, 4))
        assert bind_and_check(ps, lambda: ad.tsum(enc.encode(toks))) < 1e-4
