"""Acceptance gate: every release-blocking behavior at its contract tolerance.

Each test checks one criterion end to end with independently computed
expectations (plain-math oracles, Bessel-series spectra, exhaustive scans)
and reports a single [PASS]/[FAIL] line in the terminal summary.
"""

from __future__ import annotations

import itertools
import math
import time
from collections import defaultdict
from contextlib import contextmanager

import numpy as np
from scipy.special import jv

from somson.cli import main
from somson.som import (
    GridShape,
    SomGrid,
    TrainingConfig,
    find_bmu,
    fit_som,
    init_grid,
    lattice_coords,
    quantization_error,
    schedule,
    train,
    train_step,
)
from somson.sonify import (
    SonifierParams,
    carrier_frequencies,
    master_gain,
    modulation_index,
    partial_amplitudes,
    synthesize,
    tremolo_frequency,
)
from somson.bundle import import_bundle

from tests.conftest import ACCEPTANCE_RESULTS, two_cluster_items
from tests.dsp import (
    amplitude_spectrum,
    band_energy,
    envelope_flatness,
    envelope_spectrum_peak,
    interpolated_peak,
)

RATE = 48000


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        ACCEPTANCE_RESULTS.append(f"[FAIL] {name}")
        raise
    ACCEPTANCE_RESULTS.append(f"[PASS] {name}")


def rel_err(got: float, want: float) -> float:
    return abs(got - want) if want == 0.0 else abs(got - want) / abs(want)


# --------------------------------------------------------------- criterion 1


def test_equation_oracle_sweep():
    """All four parameter equations against direct-evaluation oracles,
    101 evenly spaced inputs each, relative error < 1e-12, under 1 s."""

    def oracle_carriers(x):
        return [25.0 * 2.0**i * 2.0 ** (4.0 * x / 12.0) for i in range(9)]

    def oracle_index(r):
        return 0.4 * 5.0 ** (2.8 * r) + 0.6 * r * 5.0**2.8

    def oracle_amp(f, s):
        return math.exp(-0.5 * (6.66 * (math.log2(f) / 9.0 - (0.5 + 0.24 * s))) ** 2)

    def oracle_trem(b):
        return 8.0 * b

    with criterion("equation oracle sweep (101 points each, rel err < 1e-12, < 1 s)"):
        started = time.perf_counter()
        sweep = np.linspace(0.0, 1.0, 101)
        for x in sweep:
            for got, want in zip(carrier_frequencies(x), oracle_carriers(x)):
                assert rel_err(float(got), want) < 1e-12
            assert rel_err(modulation_index(x), oracle_index(x)) < 1e-12
            freqs = carrier_frequencies(0.37)
            for got, want in zip(
                partial_amplitudes(freqs, x), (oracle_amp(f, x) for f in freqs)
            ):
                assert rel_err(float(got), want) < 1e-12
            assert rel_err(tremolo_frequency(x), oracle_trem(x)) < 1e-12
        # anchors
        assert carrier_frequencies(0.0).tolist() == [25.0 * 2.0**i for i in range(9)]
        assert modulation_index(0.0) == 0.4
        assert rel_err(modulation_index(1.0), 5.0**2.8) < 1e-12
        assert tremolo_frequency(0.0) == 0.0
        assert time.perf_counter() - started < 1.0


# --------------------------------------------------------------- criterion 2


def test_spectral_render_peaks():
    """2 s render: measured peak frequencies within 1 Hz of the carrier
    equation, relative magnitudes within 5% for the five largest partials,
    under 5 s."""
    with criterion("spectral render peaks (1 Hz / 5% on five largest partials, < 5 s)"):
        started = time.perf_counter()
        params = SonifierParams(0.5, 0.0, 0.5, 0.0)
        freqs_c = carrier_frequencies(params.chroma)
        amps = partial_amplitudes(freqs_c, params.sharpness)
        largest = np.argsort(amps)[::-1][:5]

        block = synthesize(params, 0.0, 2 * RATE, RATE)
        spectrum_f, spectrum_a = amplitude_spectrum(block.samples, RATE)
        measured = {}
        for i in largest:
            peak_f, peak_a = interpolated_peak(
                spectrum_f, spectrum_a, freqs_c[i] - 5.0, freqs_c[i] + 5.0
            )
            assert abs(peak_f - freqs_c[i]) < 1.0
            measured[i] = peak_a
        reference = largest[0]
        for i in largest:
            want = amps[i] / amps[reference]
            got = measured[i] / measured[reference]
            assert rel_err(got, want) < 0.05
        assert time.perf_counter() - started < 5.0


# --------------------------------------------------------------- criterion 3


def folded_sideband_oracle(params: SonifierParams, targets) -> dict[float, float]:
    """Expected spectral amplitude at each target frequency from the
    Bessel expansion, with negative-frequency images folded back with
    their sign."""
    freqs_c = carrier_frequencies(params.chroma)
    amps = partial_amplitudes(freqs_c, params.sharpness)
    index = modulation_index(params.roughness)
    gain = master_gain(amps)
    coeffs: dict[float, float] = defaultdict(float)
    for amp, fc in zip(amps, freqs_c):
        for k in range(-80, 81):
            f = fc + 30.0 * k
            c = amp * float(jv(k, index))
            if f < 0.0:
                f, c = -f, -c
            if f > 0.0:
                coeffs[round(f, 6)] += c
    return {t: gain * abs(coeffs.get(t, 0.0)) for t in targets}


def test_fm_sidebands():
    """Sidebands spaced 30 Hz around the strongest carrier, matching the
    Bessel-series oracle; sideband-to-carrier energy strictly grows with
    the roughness input.  Under 5 s."""
    with criterion("fm sidebands (30 Hz spacing, energy ratio grows, < 5 s)"):
        started = time.perf_counter()
        params = SonifierParams(0.0, 0.3, 1.0, 0.0)
        freqs_c = carrier_frequencies(params.chroma)
        amps = partial_amplitudes(freqs_c, params.sharpness)
        fc = float(freqs_c[int(np.argmax(amps))])

        block = synthesize(params, 0.0, 2 * RATE, RATE)
        spectrum_f, spectrum_a = amplitude_spectrum(block.samples, RATE)
        oracle = folded_sideband_oracle(params, (fc - 30.0, fc, fc + 30.0))
        for target in (fc - 30.0, fc + 30.0):
            assert oracle[target] > 0.005  # the sideband is really there
            peak_f, peak_a = interpolated_peak(
                spectrum_f, spectrum_a, target - 4.0, target + 4.0
            )
            assert abs(peak_f - target) < 1.0
            assert rel_err(peak_a, oracle[target]) < 0.02

        def sideband_ratio(roughness: float) -> float:
            p = SonifierParams(0.0, roughness, 1.0, 0.0)
            b = synthesize(p, 0.0, 2 * RATE, RATE)
            _, spec = amplitude_spectrum(b.samples, RATE)
            total = float(np.sum(spec**2))
            carriers = band_energy(b.samples, RATE, carrier_frequencies(0.0))
            return (total - carriers) / carriers

        assert sideband_ratio(0.0) < sideband_ratio(0.6)
        assert time.perf_counter() - started < 5.0


# --------------------------------------------------------------- criterion 4

# a chroma that puts every carrier on a multiple of the 30 Hz modulator:
# the tone becomes 30 Hz periodic, so with fluctuation off the envelope
# has no content below 30 Hz at all
COMMENSURATE_CHROMA = 3.0 * math.log2(1.2)


def test_tremolo_and_flatness():
    """Envelope peaks at 2/4/8 Hz within 0.1 Hz for quarter/half/full
    fluctuation; at zero fluctuation the envelope is flat within 0.1%
    outside the first and last 50 ms."""
    with criterion("tremolo peaks 2/4/8 Hz within 0.1 Hz, flat within 0.1% when off"):
        for fluctuation, want_hz in ((0.25, 2.0), (0.5, 4.0), (1.0, 8.0)):
            params = SonifierParams(COMMENSURATE_CHROMA, 0.0, 1.0, fluctuation)
            block = synthesize(params, 0.0, 4 * RATE, RATE)
            peak_hz, depth = envelope_spectrum_peak(block.samples, RATE)
            assert abs(peak_hz - want_hz) < 0.1
            assert depth > 0.5  # the tremolo dominates the envelope
        steady = SonifierParams(COMMENSURATE_CHROMA, 0.0, 1.0, 0.0)
        block = synthesize(steady, 0.0, RATE, RATE)
        assert envelope_flatness(block.samples, RATE) < 0.001


# --------------------------------------------------------------- criterion 5


def eight_connected_components(cells: set) -> list[set]:
    remaining = set(cells)
    parts = []
    while remaining:
        seen: set = set()
        stack = [next(iter(remaining))]
        while stack:
            cell = stack.pop()
            if cell in seen or cell not in remaining:
                continue
            seen.add(cell)
            row, col = cell
            stack += [
                (row + dr, col + dc)
                for dr in (-1, 0, 1)
                for dc in (-1, 0, 1)
                if dr or dc
            ]
        remaining -= seen
        parts.append(seen)
    return parts


def king_path(start, end):
    """Shortest lattice walk (diagonal steps allowed) between two cells."""
    row, col = start
    cells = [(row, col)]
    while (row, col) != end:
        row += (end[0] > row) - (end[0] < row)
        col += (end[1] > col) - (end[1] < col)
        cells.append((row, col))
    return cells


def test_cluster_map_properties():
    """Two separated 4-D Gaussian clusters (8 + 7 items, separation five
    times the spread), default 16x16 map, 2000 rounds, fixed seeds:
    disjoint cluster regions each forming one connected patch, a distance
    ridge at least twice the within-cluster level on the path between the
    clusters, and at least an 80% quantization-error drop.  Under 10 s."""
    with criterion("cluster map: disjoint connected regions, ridge >= 2x, qe drop >= 80%, < 10 s"):
        started = time.perf_counter()
        items, first_ids, second_ids = two_cluster_items()
        shape = GridShape(16, 16)
        config = TrainingConfig(seed=0)
        fit = fit_som(items, shape, config)

        bmu_first = {fit.placement[i] for i in first_ids}
        bmu_second = {fit.placement[i] for i in second_ids}
        assert bmu_first.isdisjoint(bmu_second)

        # region per cluster: cells whose pointer is nearest to one of its
        # items; each cluster's placements must sit in a single connected
        # component of its own region
        data = fit.normalizer.transform_many(items)
        first_set = set(first_ids)
        owners = np.array(
            [
                items[int(np.argmin(np.linalg.norm(data - p, axis=1)))].id in first_set
                for p in fit.grid.pointers
            ]
        ).reshape(shape.rows, shape.cols)
        region_first = {tuple(c) for c in np.argwhere(owners)}
        region_second = {tuple(c) for c in np.argwhere(~owners)}
        assert any(
            bmu_first <= part for part in eight_connected_components(region_first)
        )
        assert any(
            bmu_second <= part for part in eight_connected_components(region_second)
        )

        def centroid(cells):
            arr = np.array(sorted(cells), dtype=float).mean(axis=0)
            return int(round(arr[0])), int(round(arr[1]))

        path = king_path(centroid(bmu_first), centroid(bmu_second))
        ridge = float(np.mean([fit.umatrix[c] for c in path]))
        within = float(np.mean([fit.umatrix[c] for c in bmu_first | bmu_second]))
        assert ridge >= 2.0 * within

        initial = init_grid(shape, 4, np.random.default_rng(config.seed))
        qe_start = quantization_error(initial, data)
        qe_end = quantization_error(fit.grid, data)
        assert qe_end <= 0.2 * qe_start
        assert time.perf_counter() - started < 10.0


# --------------------------------------------------------------- criterion 6


def test_determinism_and_round_trip(tmp_path):
    """Two seed-42 pipeline runs agree byte for byte on bundle, images,
    and audio; importing and re-saving a bundle is lossless."""
    with criterion("determinism: seed-42 reruns byte-identical, bundle round trip lossless"):
        outputs = {}
        for run in ("one", "two"):
            base = tmp_path / run
            base.mkdir()
            bundle = base / "demo.json"
            assert main([
                "train", "--features", "data/demo.csv", "--out", str(bundle),
                "--seed", "42",
            ]) == 0
            umatrix_png = base / "umatrix.png"
            plane_png = base / "plane.png"
            node_wav = base / "node.wav"
            assert main([
                "plot", "--bundle", str(bundle), "--show-items",
                "--out", str(umatrix_png),
            ]) == 0
            assert main([
                "plot", "--bundle", str(bundle), "--view", "component:0",
                "--out", str(plane_png),
            ]) == 0
            assert main([
                "render", "--bundle", str(bundle), "--node", "3,5",
                "--seconds", "1", "--out", str(node_wav),
            ]) == 0
            outputs[run] = [
                p.read_bytes() for p in (bundle, umatrix_png, plane_png, node_wav)
            ]
        assert outputs["one"] == outputs["two"]

        original = tmp_path / "one" / "demo.json"
        resaved = tmp_path / "resaved.json"
        import_bundle(str(original)).save(str(resaved))
        assert resaved.read_bytes() == original.read_bytes()


# --------------------------------------------------------------- criterion 7


def scan_bmu(pointers: np.ndarray, query: np.ndarray) -> tuple[int, bool]:
    """Exhaustive first-minimum scan; also reports whether the minimum
    was tied."""
    best, best_d, tied = 0, math.inf, False
    for k, pointer in enumerate(pointers):
        d = math.dist(pointer, query)
        if d < best_d:
            best, best_d, tied = k, d, False
        elif d == best_d:
            tied = True
    return best, tied


def test_bmu_oracle_and_containment():
    """10,000 randomized nearest-node queries on small grids agree with an
    exhaustive scan, tie-breaking included; and every pointer stays inside
    the unit hypercube after every single training update."""
    with criterion("bmu matches exhaustive scan on 10,000 queries, pointers stay in [0,1]"):
        rng = np.random.default_rng(417)
        queries_done = 0
        ties_seen = 0
        for grid_index in range(25):
            rows = int(rng.integers(2, 9))
            cols = int(rng.integers(2, 9))
            dim = int(rng.choice([1, 2, 4, 7]))
            shape = GridShape(rows, cols)
            if grid_index % 2:
                # eighth-steps make duplicate pointers and exact ties common
                pointers = rng.integers(0, 9, size=(shape.n_nodes, dim)) / 8.0
            else:
                pointers = rng.random((shape.n_nodes, dim))
                pointers[shape.n_nodes // 2] = pointers[0]  # engineered duplicate
            grid = SomGrid(shape=shape, dim=dim, pointers=pointers)
            for _ in range(400):
                roll = rng.random()
                if roll < 0.25:
                    query = pointers[int(rng.integers(shape.n_nodes))].copy()
                elif roll < 0.5:
                    query = rng.integers(0, 17, size=dim) / 16.0
                else:
                    query = rng.random(dim)
                want, tied = scan_bmu(grid.pointers, query)
                assert find_bmu(grid, query) == want
                queries_done += 1
                ties_seen += tied
        assert queries_done == 10000
        assert ties_seen >= 100  # the tie-break path was really exercised

        # containment: mirror the training loop over corner-heavy data and
        # check bounds after every update
        shape = GridShape(6, 6)
        config = TrainingConfig(rounds=40, seed=5).with_defaults(shape)
        corners = [
            np.array(bits, dtype=float)
            for bits in itertools.product((0.0, 1.0), repeat=4)
        ]
        data = np.stack(corners + [np.full(4, 0.5)])
        mirror_rng = np.random.default_rng(config.seed)
        start = init_grid(shape, 4, mirror_rng)
        pointers = start.pointers.copy()
        coords = lattice_coords(shape)
        for round_index in range(config.rounds):
            alpha, sigma = schedule(round_index, config)
            for sample_index in mirror_rng.permutation(len(data)):
                train_step(pointers, coords, data[sample_index], alpha, sigma)
                assert pointers.min() >= 0.0 and pointers.max() <= 1.0

        # the mirror must be the real algorithm: replaying init and
        # training on one shared stream reproduces it bit for bit
        from somson.som import Item, Normalizer

        identity = Normalizer(minimum=np.zeros(4), maximum=np.ones(4))
        samples = [Item(id=f"c{k}", label="corner", features=row) for k, row in enumerate(data)]
        replay_rng = np.random.default_rng(config.seed)
        replay_start = init_grid(shape, 4, replay_rng)
        replayed = train(replay_start, samples, config, identity, rng=replay_rng)
        assert np.array_equal(replayed.pointers, pointers)


# --------------------------------------------------------------- criterion 8


def test_clipping_bound():
    """No sample ever exceeds full scale across a 5x5x5x5 parameter grid
    of half-second renders."""
    with criterion("clipping bound: |sample| <= 1 over the 5^4 parameter grid"):
        levels = np.linspace(0.0, 1.0, 5)
        worst = 0.0
        for combo in itertools.product(levels, repeat=4):
            block = synthesize(SonifierParams(*combo), 0.0, RATE // 2, RATE)
            worst = max(worst, float(np.max(np.abs(block.samples))))
        assert worst <= 1.0
