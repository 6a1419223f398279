import cmath
import math

import pytest
import torch

from src.backprojection import (
    ChannelImageStack,
    FrequencyImageStack,
    ImageGrid,
    backproject_stacks,
)
from src.coherence import (
    CoherenceMap,
    MapKind,
    _bounded,
    _coherence_factor,
    _phase_coherence_factor,
    apply_map,
    cf_2d,
    cf_frequency,
    cf_spatial,
    compute_map,
    compute_maps,
    incoherent_power,
    pcf_2d,
    pcf_frequency,
    pcf_spatial,
)
from src.errors import ConsistencyError, InputError
from src.forward import simulate_with_multipath
from src.geometry import ImageRegion

PIXEL = ImageRegion(0.0, 1.0, 0.0, 1.0, 1, 1)


def _channels(*values: complex) -> ChannelImageStack:
    layers = torch.tensor(values, dtype=torch.complex128).reshape(len(values), 1, 1)
    return ChannelImageStack(PIXEL, layers)


def _frequencies(*values: complex) -> FrequencyImageStack:
    layers = torch.tensor(values, dtype=torch.complex128).reshape(len(values), 1, 1)
    return FrequencyImageStack(PIXEL, layers)


def _phasors(*phases: float) -> tuple:
    return tuple(cmath.exp(1j * p) for p in phases)


def _value(coherence_map: CoherenceMap) -> float:
    return float(coherence_map.values[0, 0])


class TestCoherenceFactor:
    def test_equal_channels(self):
        assert _value(cf_spatial(_channels(1, 1, 1, 1))) == 1.0

    def test_cancelling_channels(self):
        assert _value(cf_spatial(_channels(1, -1))) == 0.0

    def test_hand_evaluated(self):
        assert _value(cf_spatial(_channels(1, 1j, 1))) == pytest.approx(5 / 9, abs=1e-15)
        assert _value(cf_frequency(_frequencies(1, 1j, 1))) == pytest.approx(
            5 / 9, abs=1e-15
        )

    def test_frequency_equal_layers(self):
        assert _value(cf_frequency(_frequencies(0.3j, 0.3j))) == pytest.approx(1.0)

    def test_zero_energy_pixel_maps_to_zero(self):
        assert _value(cf_spatial(_channels(0, 0, 0))) == 0.0

    def test_incoherent_power(self):
        power = incoherent_power(_channels(1, 1j, 2))
        assert float(power[0, 0]) == pytest.approx(3 * (1 + 1 + 4))

    def test_depth_one_is_unit_coherence(self):
        assert _value(cf_spatial(_channels(0.2 - 0.7j))) == pytest.approx(1.0)
        assert _value(cf_frequency(_frequencies(-3.0 + 0.1j))) == pytest.approx(1.0)


class TestPhaseCoherenceFactor:
    def test_common_phase(self):
        assert _value(pcf_spatial(_channels(*_phasors(0.7, 0.7, 0.7)))) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_four_fold_symmetry(self):
        phases = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)
        assert _value(pcf_spatial(_channels(*_phasors(*phases)))) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_quadrature_pair(self):
        expected = 1 - math.sqrt(0.5)
        assert _value(pcf_spatial(_channels(1, 1j))) == pytest.approx(expected, abs=1e-12)
        assert _value(pcf_frequency(_frequencies(1, 1j))) == pytest.approx(
            expected, abs=1e-12
        )

    def test_opposite_layers(self):
        assert _value(pcf_frequency(_frequencies(1, -1))) == pytest.approx(0.0, abs=1e-12)

    def test_depth_one_is_unit_coherence(self):
        assert _value(pcf_spatial(_channels(0.2 - 0.7j))) == pytest.approx(1.0)
        assert _value(pcf_frequency(_frequencies(-3.0 + 0.1j))) == pytest.approx(1.0)

    def test_ignores_magnitudes(self):
        assert _value(pcf_spatial(_channels(3.0, 0.01, 7.5))) == pytest.approx(1.0)


class TestTwoDimensional:
    def test_products(self):
        cf = cf_spatial(_channels(1, 1j, 1))
        cff = cf_frequency(_frequencies(1, 1j, 1))
        assert _value(cf_2d(cf, cff)) == pytest.approx(25 / 81, abs=1e-15)
        pcf = pcf_spatial(_channels(1, 1j))
        pcff = pcf_frequency(_frequencies(1, 1j))
        assert _value(pcf_2d(pcf, pcff)) == pytest.approx(0.08579, abs=1e-5)

    def test_zero_is_absorbing(self):
        cf = cf_spatial(_channels(1, -1))
        cff = cf_frequency(_frequencies(1, 1))
        assert _value(cf_2d(cf, cff)) == 0.0

    def test_kinds_are_checked(self):
        cf = cf_spatial(_channels(1, 1))
        with pytest.raises(InputError):
            cf_2d(cf, cf)
        with pytest.raises(InputError):
            pcf_2d(pcf_spatial(_channels(1, 1)), cf_frequency(_frequencies(1, 1)))

    def test_regions_are_checked(self):
        other = ImageRegion(0.0, 2.0, 0.0, 1.0, 1, 1)
        cff = CoherenceMap(other, torch.ones(1, 1, dtype=torch.float64), MapKind.CFF)
        with pytest.raises(InputError):
            cf_2d(cf_spatial(_channels(1, 1)), cff)


@pytest.fixture(scope="module")
def random_stacks():
    generator = torch.Generator().manual_seed(2024)
    depth = 7
    shape = (depth, 100, 100)
    layers = torch.complex(
        torch.randn(shape, generator=generator, dtype=torch.float64),
        torch.randn(shape, generator=generator, dtype=torch.float64),
    )
    # Some exact zeros and some strongly coherent pixels.
    layers[:, :5, :] = 0
    layers[:, 5:10, :] = layers[0, 5:10, :]
    region = ImageRegion(0.0, 1.0, 0.0, 1.0, 100, 100)
    return ChannelImageStack(region, layers), FrequencyImageStack(region, layers)


class TestProperties:
    def test_bounds_before_clamping(self, random_stacks):
        channel_stack, _ = random_stacks
        for values in (
            _coherence_factor(channel_stack),
            _phase_coherence_factor(channel_stack),
        ):
            assert float(values.min()) >= -1e-12
            assert float(values.max()) <= 1.0 + 1e-12

    def test_pcf_on_unit_phasors_follows_cf(self, random_stacks):
        channel_stack, _ = random_stacks
        layers = channel_stack.layers[:, 10:, :]
        unit = ChannelImageStack(
            ImageRegion(0.0, 1.0, 0.0, 0.9, 100, 90), layers / torch.abs(layers)
        )
        cf = cf_spatial(unit).values
        pcf = pcf_spatial(unit).values
        assert torch.allclose(pcf, 1.0 - torch.sqrt(1.0 - cf), rtol=0, atol=1e-12)

    def test_two_dimensional_dominance(self, random_stacks):
        maps = compute_maps(*random_stacks)
        for two_d, spatial, frequency in (
            (MapKind.CF2D, MapKind.CF, MapKind.CFF),
            (MapKind.PCF2D, MapKind.PCF, MapKind.PCFF),
        ):
            bound = torch.minimum(maps[spatial].values, maps[frequency].values)
            assert bool(torch.all(maps[two_d].values <= bound + 1e-15))

    def test_common_rotation_invariance(self, random_stacks):
        channel_stack, _ = random_stacks
        rotated = ChannelImageStack(
            channel_stack.region, channel_stack.layers * cmath.exp(0.83j)
        )
        assert torch.allclose(
            cf_spatial(rotated).values, cf_spatial(channel_stack).values, atol=1e-12
        )
        assert torch.allclose(
            pcf_spatial(rotated).values, pcf_spatial(channel_stack).values, atol=1e-9
        )

    def test_compute_map_matches_compute_maps(self, random_stacks):
        maps = compute_maps(*random_stacks)
        assert list(maps) == list(MapKind)
        for kind in MapKind:
            assert torch.equal(compute_map(kind, *random_stacks).values, maps[kind].values)


def test_oracle_on_small_stacks():
    generator = torch.Generator().manual_seed(5)
    region = ImageRegion(0.0, 1.0, 0.0, 1.0, 3, 2)
    for depth in (1, 2, 3, 4):
        layers = torch.complex(
            torch.randn((depth, 2, 3), generator=generator, dtype=torch.float64),
            torch.randn((depth, 2, 3), generator=generator, dtype=torch.float64),
        )
        stack = ChannelImageStack(region, layers)
        cf, pcf = cf_spatial(stack).values, pcf_spatial(stack).values
        for l in range(2):  # noqa: E741
            for k in range(3):
                ys = [complex(layers[d, l, k]) for d in range(depth)]
                expected_cf = abs(sum(ys)) ** 2 / (depth * sum(abs(y) ** 2 for y in ys))
                phases = [cmath.phase(y) for y in ys]
                mean_cos = sum(math.cos(p) for p in phases) / depth
                mean_sin = sum(math.sin(p) for p in phases) / depth
                var = sum(
                    (math.cos(p) - mean_cos) ** 2 + (math.sin(p) - mean_sin) ** 2
                    for p in phases
                ) / depth
                assert float(cf[l, k]) == pytest.approx(expected_cf, abs=1e-12)
                assert float(pcf[l, k]) == pytest.approx(1 - math.sqrt(var), abs=1e-12)


def test_out_of_range_values_raise():
    with pytest.raises(ConsistencyError):
        _bounded(torch.tensor([[0.5, 1.0 + 1e-9]], dtype=torch.float64), "CF")
    clamped = _bounded(torch.tensor([[-1e-13, 1.0 + 1e-13]], dtype=torch.float64), "CF")
    assert float(clamped.min()) == 0.0 and float(clamped.max()) == 1.0


def test_map_kind_names():
    assert MapKind.parse("CF2D") is MapKind.CF2D
    assert str(MapKind.PCFF) == "pcff"
    with pytest.raises(InputError):
        MapKind.parse("cf3d")


class TestApplyMap:
    region = ImageRegion(0.0, 1.0, 0.0, 1.0, 4, 4)

    def _image(self) -> ImageGrid:
        generator = torch.Generator().manual_seed(0)
        pixels = torch.randn((4, 4), generator=generator, dtype=torch.complex128)
        return ImageGrid(self.region, pixels)

    def test_ones_and_zeros(self):
        image = self._image()
        ones = CoherenceMap(self.region, torch.ones(4, 4, dtype=torch.float64), MapKind.CF)
        zeros = CoherenceMap(self.region, torch.zeros(4, 4, dtype=torch.float64), MapKind.CF)
        assert torch.equal(apply_map(image, ones).pixels, image.pixels)
        assert torch.equal(apply_map(image, zeros).magnitude(), torch.zeros(4, 4, dtype=torch.float64))

    def test_never_amplifies(self):
        image = self._image()
        values = torch.rand((4, 4), generator=torch.Generator().manual_seed(1), dtype=torch.float64)
        enhanced = apply_map(image, CoherenceMap(self.region, values, MapKind.PCF))
        assert bool(torch.all(enhanced.magnitude() <= image.magnitude()))

    def test_region_mismatch(self):
        other = ImageRegion(0.0, 2.0, 0.0, 1.0, 4, 4)
        coherence_map = CoherenceMap(other, torch.ones(4, 4, dtype=torch.float64), MapKind.CF)
        with pytest.raises(InputError):
            apply_map(self._image(), coherence_map)


def test_numerators_agree_between_stacks(mimo_scene):
    echo = simulate_with_multipath(mimo_scene)
    channel_stack, frequency_stack = backproject_stacks(echo, mimo_scene.region)
    by_channel = torch.abs(channel_stack.layers.sum(dim=0)) ** 2
    by_frequency = torch.abs(frequency_stack.layers.sum(dim=0)) ** 2
    scale = float(by_channel.max())
    assert torch.allclose(by_channel, by_frequency, rtol=1e-12, atol=1e-12 * scale)
