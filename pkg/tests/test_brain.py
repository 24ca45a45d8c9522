import math

import numpy as np
import pytest

from sim_logic.brain import (
    Genome,
    Topology,
    describe_index,
    forward,
    genome_from_bytes,
    genome_to_bytes,
    random_genome,
    to_controls,
    zero_genome,
)
from sim_logic.exceptions import GenomeError
from sim_logic.rng import Purpose, stream


def loop_forward(weights, topology, x):
    """Dense tanh layers evaluated with plain loops over the flat weight list"""
    values = [float(v) for v in x]
    offset = 0
    for fan_in, fan_out in topology.layer_shapes:
        bias_at = offset + fan_in * fan_out
        values = [
            math.tanh(sum(weights[offset + row * fan_in + col] * values[col] for col in range(fan_in))
                      + weights[bias_at + row])
            for row in range(fan_out)
        ]
        offset = bias_at + fan_out
    return values


class TestTopology:
    def test_default_length(self, topology):
        # 14-12-8-3
        assert topology.genome_length == 14 * 12 + 12 + 12 * 8 + 8 + 8 * 3 + 3

    def test_small_net(self):
        assert Topology(input_size=3, hidden=(2,)).genome_length == 17

    def test_needs_speed_slip_and_a_ray(self):
        with pytest.raises(ValueError):
            Topology(input_size=2, hidden=(2,))

    def test_output_size_fixed(self):
        with pytest.raises(ValueError):
            Topology(input_size=4, hidden=(2,), output_size=2)


class TestDescribeIndex:
    def test_layout(self):
        topo = Topology(input_size=3, hidden=(2,))
        assert describe_index(topo, 0) == (0, 'weight', 0, 0)
        assert describe_index(topo, 4) == (0, 'weight', 1, 1)
        assert describe_index(topo, 6) == (0, 'bias', 0, -1)
        assert describe_index(topo, 8) == (1, 'weight', 0, 0)
        assert describe_index(topo, 16) == (1, 'bias', 2, -1)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            describe_index(Topology(input_size=3, hidden=(2,)), 17)

    def test_matches_layer_views(self):
        topo = Topology(input_size=4, hidden=(3,))
        genome = Genome(weights=np.arange(topo.genome_length, dtype=float), topology=topo)
        for i in range(topo.genome_length):
            layer, kind, row, col = describe_index(topo, i)
            w, b = genome.layers[layer]
            assert (w[row, col] if kind == 'weight' else b[row]) == i


class TestGenome:
    def test_random_genome_range_and_determinism(self, topology):
        a = random_genome(topology, stream(9, Purpose.INIT, 0, 0))
        b = random_genome(topology, stream(9, Purpose.INIT, 0, 0))
        c = random_genome(topology, stream(9, Purpose.INIT, 0, 1))
        assert a.same_as(b)
        assert not a.same_as(c)
        assert np.all(np.abs(a.weights) <= 1.0)

    def test_random_weights_average_to_zero(self):
        topology = Topology(input_size=997, hidden=(100,))
        assert topology.genome_length >= 100_000
        weights = random_genome(topology, stream(3, Purpose.INIT, 0, 0)).weights[:100_000]
        assert abs(weights.mean()) <= 0.02

    def test_weights_are_read_only(self, topology):
        genome = zero_genome(topology)
        with pytest.raises(ValueError):
            genome.weights[0] = 1.0

    def test_length_checked(self, topology):
        with pytest.raises(GenomeError):
            Genome(weights=np.zeros(5), topology=topology)

    def test_non_finite_rejected(self):
        topo = Topology(input_size=3, hidden=(2,))
        weights = np.zeros(17)
        weights[3] = np.nan
        with pytest.raises(GenomeError):
            Genome(weights=weights, topology=topo)


class TestForward:
    def test_zero_genome_outputs_zero(self, topology):
        assert forward(zero_genome(topology), np.linspace(0, 1, 14)) == (0.0, 0.0, 0.0)

    def test_hand_computed(self):
        topo = Topology(input_size=3, hidden=(2,))
        weights = np.zeros(17)
        weights[0:3] = (1.0, 0.0, 0.0)     # hidden 0 copies input 0
        weights[8] = 1.0                   # throttle reads hidden 0
        weights[15] = -2.0                 # brake bias
        genome = Genome(weights=weights, topology=topo)
        throttle, brake, steer = forward(genome, np.array([0.5, 0.2, 0.1]))
        assert throttle == pytest.approx(np.tanh(np.tanh(0.5)))
        assert brake == pytest.approx(np.tanh(-2.0))
        assert steer == 0.0

    @pytest.mark.parametrize('hidden', [(2,), (4, 3)])
    def test_matches_loop_oracle(self, hidden):
        topo = Topology(input_size=5, hidden=hidden)
        rng = np.random.default_rng(21)
        genome = Genome(weights=rng.uniform(-1.0, 1.0, topo.genome_length), topology=topo)
        for _ in range(20):
            x = rng.uniform(0.0, 1.0, 5)
            assert np.allclose(forward(genome, x), loop_forward(genome.weights, topo, x), rtol=0.0, atol=1e-9)

    def test_outputs_bounded(self, topology):
        rng = np.random.default_rng(1)
        genome = Genome(weights=rng.normal(0, 5, topology.genome_length), topology=topology)
        for _ in range(50):
            out = forward(genome, rng.uniform(0, 1, 14))
            assert all(-1.0 <= v <= 1.0 for v in out)

    def test_to_controls_uses_positive_parts(self):
        c = to_controls((-0.4, 0.7, -0.3))
        assert (c.throttle, c.brake, c.steer) == (0.0, 0.7, -0.3)


class TestSerialization:
    def test_round_trip_is_bit_exact(self, topology):
        genome = random_genome(topology, stream(3, Purpose.INIT, 0, 4))
        data = b'xx' + genome_to_bytes(genome)
        decoded, end = genome_from_bytes(data, 2, topology)
        assert decoded.same_as(genome)
        assert end == len(data)

    def test_truncated(self, topology):
        data = genome_to_bytes(zero_genome(topology))
        with pytest.raises(GenomeError):
            genome_from_bytes(data[:-1], 0, topology)
        with pytest.raises(GenomeError):
            genome_from_bytes(data[:2], 0, topology)
