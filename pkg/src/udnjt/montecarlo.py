"""Brute-force simulator used as the independent check on the analytics.

Transmitter layouts are Poisson draws on the annulus, conditioned by
resampling when a scheme needs a minimum number of points.  Each trial
shares one layout and one set of fade draws across all schemes (common
random numbers), splits the points into desired and interfering sets by
the scheme boundary, and folds per-trial aggregates into running sums.

Reproducibility contract: results are byte-identical for a fixed seed
regardless of worker count.  Trials are dealt to 16 fixed shards with
independently derived substreams, per-batch partial sums are kept in
shard order, and the final reduction is an exactly rounded float sum, so
the grouping of work cannot change any output bit.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import ChannelVariant, Scheme, SchemeVariant

_N_SHARDS = 16
_BATCH = 4096
_MAX_RESAMPLE = 10 ** 6

_POWER_METRICS = ("desired", "interference", "total")


# ---- single-realization API ----


@dataclass(frozen=True)
class Realization:
    """One transmitter layout: distances, power fades, and point count.

    channel records which fade law the fades were drawn from; None means
    unit placeholders that only a constant channel may rescale.
    """

    radii: np.ndarray
    fades: np.ndarray
    count: int
    channel: object = None


@dataclass(frozen=True)
class TrialOutcome:
    """Per-scheme powers for one realization, with the resulting SINR."""

    scheme: Scheme
    desired_power: float
    interference_power: float
    sinr: float


def _draw_radii(params, rng, n):
    u = rng.uniform(0.0, 1.0, n)
    return np.sqrt(params.r_l ** 2 + u * (params.r_m ** 2 - params.r_l ** 2))


def _draw_fades(channel, rng, n):
    if channel is None:
        return np.ones(n)
    if channel.variant is ChannelVariant.CONSTANT:
        return np.full(n, channel.h)
    if channel.variant is ChannelVariant.RAYLEIGH:
        return rng.exponential(1.0, n)
    return rng.gamma(channel.m, channel.omega / channel.m, n)


def sample_realization(params, rng, min_points=1, channel=None):
    """Draw one conditioned layout with fades from the given channel.

    The Poisson count is resampled until it reaches min_points; the
    resample loop is capped at 1e6 attempts so a pathologically sparse
    configuration errors out instead of spinning.  Radii come from the
    exact inverse of the annulus area law.
    """
    if min_points not in (1, 2):
        raise ValueError(f"min_points must be 1 or 2, got {min_points!r}")
    mu = params.lambda_b * params.annulus_area
    for _ in range(_MAX_RESAMPLE):
        count = int(rng.poisson(mu))
        if count >= min_points:
            radii = _draw_radii(params, rng, count)
            fades = _draw_fades(channel, rng, count)
            return Realization(radii=radii, fades=fades, count=count,
                               channel=channel)
    raise RuntimeError(
        f"could not draw {min_points} points in {_MAX_RESAMPLE} attempts "
        f"(mean count {mu!r}); the configuration is too sparse")


def _boundary(scheme, params, radii_sorted):
    if scheme.variant is SchemeVariant.NOJT:
        return radii_sorted[0]
    if scheme.variant is SchemeVariant.TWO_NS:
        if len(radii_sorted) < 2:
            raise ValueError("2ns needs at least two points per realization")
        return radii_sorted[1]
    if scheme.variant is SchemeVariant.CD:
        return scheme.r_0
    return radii_sorted[0] / scheme.eta_ratio(params)


def evaluate_schemes(real, schemes, channel, params):
    """Split one realization into desired and interference power per scheme.

    The boundary circle is inclusive: a point exactly on it serves the
    user.  Fades are the realization's stored draws, shared across all
    schemes.  A realization drawn under one fade law cannot be evaluated
    under a different one; unit placeholders (channel=None) may only be
    rescaled by a constant channel.
    """
    if real.channel is None:
        if channel is not None and channel.variant is not ChannelVariant.CONSTANT:
            raise ValueError(
                "realization carries unit fades; evaluating it under "
                f"{channel.key!r} would need draws from that law")
        fades = real.fades * (1.0 if channel is None else channel.h)
    elif channel != real.channel:
        raise ValueError(
            f"realization was drawn under {real.channel.key!r}, cannot "
            f"evaluate under {None if channel is None else channel.key!r}")
    else:
        fades = real.fades
    order = np.argsort(real.radii, kind="stable")
    radii = real.radii[order]
    power = params.k_s * params.p_s * fades[order] * radii ** -params.alpha_s
    outcomes = []
    for scheme in schemes:
        scheme.validate_against(params)
        bound = _boundary(scheme, params, radii)
        inside = radii <= bound
        desired = math.fsum(power[inside])
        interference = math.fsum(power[~inside])
        denom = interference + params.n_0
        sinr = desired / denom if denom > 0.0 else math.inf
        outcomes.append(TrialOutcome(scheme=scheme, desired_power=desired,
                                     interference_power=interference,
                                     sinr=sinr))
    return outcomes


# ---- experiment runner ----


@dataclass(frozen=True)
class EmpiricalStats:
    """Streamed sample statistics for one (scheme, metric) cell.

    standard_error is the usual sqrt(variance / n).  For power metrics
    variance_standard_error carries the fourth-moment (delta method)
    error of the sample variance.  SINR and efficiency samples can be
    infinite when interference is zero at zero noise; those trials are
    excluded from the moments and counted in n_infinite.  mgf_at holds
    (z_grid, estimate, standard_error) arrays; histogram holds
    (bin_edges, mass, n_out_of_range) with mass normalized by all trials.
    """

    n_trials: int
    mean: float
    variance: float
    standard_error: float
    variance_standard_error: float = None
    n_infinite: int = 0
    mgf_at: tuple = None
    histogram: tuple = None


_KNOWN_COLLECTORS = ("mean-power", "variance", "mgf", "histogram",
                     "sinr", "se")


def _normalize_collectors(collectors):
    if collectors is None:
        collectors = {"mean-power": True, "variance": True}
    unknown = set(collectors) - set(_KNOWN_COLLECTORS)
    if unknown:
        raise ValueError(f"unknown collectors {sorted(unknown)!r}; "
                         f"known: {list(_KNOWN_COLLECTORS)}")
    return dict(collectors)


def _min_points(schemes):
    return 2 if any(s.variant is SchemeVariant.TWO_NS for s in schemes) else 1


def _shard_sizes(n_trials):
    base, extra = divmod(n_trials, _N_SHARDS)
    return [base + (1 if i < extra else 0) for i in range(_N_SHARDS)]


def _batch_kernel(params, schemes, channel, rng, n_batch, min_points):
    """Aggregate one batch of trials into per-scheme power arrays.

    Returns {scheme: (desired, interference)} arrays of length n_batch.
    Counts below min_points are redrawn as whole trials; radii are sorted
    within each trial segment so per-trial boundaries read off directly.
    """
    mu = params.lambda_b * params.annulus_area
    counts = rng.poisson(mu, n_batch)
    attempts = 0
    while True:
        low = counts < min_points
        if not low.any():
            break
        attempts += 1
        if attempts > _MAX_RESAMPLE:
            raise RuntimeError(
                f"could not draw {min_points} points per trial in "
                f"{_MAX_RESAMPLE} batch passes (mean count {mu!r})")
        counts[low] = rng.poisson(mu, int(low.sum()))
    n_points = int(counts.sum())
    radii = _draw_radii(params, rng, n_points)
    fades = _draw_fades(channel, rng, n_points)
    seg = np.repeat(np.arange(n_batch), counts)
    order = np.lexsort((radii, seg))
    rs = radii[order]
    power = params.k_s * params.p_s * fades[order] * rs ** -params.alpha_s
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    nearest = rs[starts]
    out = {}
    for scheme in schemes:
        if scheme.variant is SchemeVariant.NOJT:
            bound = nearest
        elif scheme.variant is SchemeVariant.TWO_NS:
            bound = rs[starts + 1]
        elif scheme.variant is SchemeVariant.CD:
            bound = np.full(n_batch, scheme.r_0)
        else:
            bound = nearest / scheme.eta_ratio(params)
        inside = rs <= bound[seg]
        desired = np.add.reduceat(np.where(inside, power, 0.0), starts)
        interference = np.add.reduceat(np.where(inside, 0.0, power), starts)
        out[scheme] = (desired, interference)
    return out


def _fold_power(cell, x):
    cell["s1"].append(float(x.sum()))
    x2 = x * x
    cell["s2"].append(float(x2.sum()))
    cell["s3"].append(float((x2 * x).sum()))
    cell["s4"].append(float((x2 * x2).sum()))


def _run_shard(params, schemes, channel, seed_seq, n_shard, min_points,
               collectors):
    """Run one shard's trials and return per-batch partial sums.

    Partials stay as per-batch lists so the parent can merge shards in a
    fixed order with exactly rounded summation.
    """
    rng = np.random.default_rng(seed_seq)
    want_ratio = collectors.get("sinr") or collectors.get("se")
    z_grid = collectors.get("mgf")
    hist_spec = collectors.get("histogram") or {}
    part = {}
    for scheme in schemes:
        for metric in _POWER_METRICS:
            part[(scheme, metric)] = {"s1": [], "s2": [], "s3": [], "s4": []}
        for metric in ("sinr", "se"):
            if collectors.get(metric):
                part[(scheme, metric)] = {"s1": [], "s2": [], "s3": [],
                                          "s4": [], "n_inf": 0}
        if z_grid is not None:
            for metric in _POWER_METRICS:
                part[(scheme, metric, "mgf")] = {"e1": [], "e2": []}
    for key, edges in hist_spec.items():
        part[(key[0], key[1], "hist")] = {
            "counts": np.zeros(len(edges) - 1, dtype=np.int64), "out": 0}

    remaining = n_shard
    while remaining > 0:
        n_batch = min(_BATCH, remaining)
        remaining -= n_batch
        batch = _batch_kernel(params, schemes, channel, rng, n_batch,
                              min_points)
        for scheme, (desired, interference) in batch.items():
            total = desired + interference
            series = {"desired": desired, "interference": interference,
                      "total": total}
            for metric in _POWER_METRICS:
                _fold_power(part[(scheme, metric)], series[metric])
            if want_ratio:
                denom = interference + params.n_0
                with np.errstate(divide="ignore"):
                    sinr = np.where(denom > 0.0, desired / denom, np.inf)
                finite = np.isfinite(sinr)
                if collectors.get("sinr"):
                    cell = part[(scheme, "sinr")]
                    _fold_power(cell, sinr[finite])
                    cell["n_inf"] += int((~finite).sum())
                if collectors.get("se"):
                    cell = part[(scheme, "se")]
                    _fold_power(cell, np.log2(1.0 + sinr[finite]))
                    cell["n_inf"] += int((~finite).sum())
            if z_grid is not None:
                for metric in _POWER_METRICS:
                    cell = part[(scheme, metric, "mgf")]
                    x = series[metric]
                    cell["e1"].append(np.array(
                        [float(np.exp(-z * x).sum()) for z in z_grid]))
                    cell["e2"].append(np.array(
                        [float(np.exp(-2.0 * z * x).sum()) for z in z_grid]))
            for (skey, metric), edges in hist_spec.items():
                if skey != scheme:
                    continue
                cell = part[(scheme, metric, "hist")]
                x = series[metric]
                counts, _ = np.histogram(x, bins=edges)
                cell["counts"] += counts
                cell["out"] += int(len(x) - counts.sum())
    return part


def _merge_column(shards, key, name):
    vals = []
    for shard in shards:
        vals.extend(shard[key][name])
    return math.fsum(vals)


def _moment_stats(shards, key, n):
    s1 = _merge_column(shards, key, "s1")
    s2 = _merge_column(shards, key, "s2")
    s3 = _merge_column(shards, key, "s3")
    s4 = _merge_column(shards, key, "s4")
    mean = s1 / n
    variance = max((s2 - s1 * s1 / n) / (n - 1), 0.0)
    mu4 = s4 / n - 4.0 * mean * s3 / n + 6.0 * mean ** 2 * s2 / n \
        - 3.0 * mean ** 4
    var_of_var = (mu4 - variance ** 2 * (n - 3) / (n - 1)) / n
    return {
        "mean": mean,
        "variance": variance,
        "standard_error": math.sqrt(variance / n),
        "variance_standard_error": math.sqrt(max(var_of_var, 0.0)),
    }


def run_experiment(params, schemes, channel, n_trials, seed, collectors=None,
                   workers=None):
    """Simulate n_trials layouts and return {(scheme, metric): stats}.

    Power metrics ("desired", "interference", "total") are always
    collected; "sinr" and "se" (log2(1 + SINR)) on request; "mgf" takes a
    z grid and attaches transform estimates to every power metric;
    "histogram" takes {(scheme, metric): bin_edges}.  The output is
    byte-identical for a fixed seed across reruns and worker counts.
    """
    if n_trials < 100:
        raise ValueError(f"n_trials must be at least 100, got {n_trials!r}")
    schemes = list(schemes)
    if not schemes:
        raise ValueError("need at least one scheme")
    for scheme in schemes:
        scheme.validate_against(params)
    collectors = _normalize_collectors(collectors)
    min_points = _min_points(schemes)
    sizes = _shard_sizes(int(n_trials))
    seqs = np.random.SeedSequence(seed).spawn(_N_SHARDS)
    jobs = [(params, schemes, channel, seqs[i], sizes[i], min_points,
             collectors) for i in range(_N_SHARDS) if sizes[i] > 0]
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(_run_shard, *zip(*jobs)))
    else:
        shards = [_run_shard(*job) for job in jobs]

    n = int(n_trials)
    z_grid = collectors.get("mgf")
    hist_spec = collectors.get("histogram") or {}
    results = {}
    for scheme in schemes:
        metrics = list(_POWER_METRICS)
        metrics += [m for m in ("sinr", "se") if collectors.get(m)]
        for metric in metrics:
            key = (scheme, metric)
            n_inf = sum(shard[key].get("n_inf", 0) for shard in shards)
            n_eff = n - n_inf
            stats = _moment_stats(shards, key, n_eff)
            mgf_at = None
            if z_grid is not None and metric in _POWER_METRICS:
                cols1 = []
                cols2 = []
                for j in range(len(z_grid)):
                    vals1 = []
                    vals2 = []
                    for shard in shards:
                        vals1.extend(a[j] for a in
                                     shard[key + ("mgf",)]["e1"])
                        vals2.extend(a[j] for a in
                                     shard[key + ("mgf",)]["e2"])
                    cols1.append(math.fsum(vals1))
                    cols2.append(math.fsum(vals2))
                est = np.array(cols1) / n
                second = np.array(cols2) / n
                se = np.sqrt(np.maximum(second - est ** 2, 0.0) / n)
                mgf_at = (np.asarray(z_grid, dtype=float), est, se)
            histogram = None
            if (scheme, metric) in hist_spec:
                edges = np.asarray(hist_spec[(scheme, metric)], dtype=float)
                counts = np.zeros(len(edges) - 1, dtype=np.int64)
                out = 0
                for shard in shards:
                    cell = shard[(scheme, metric, "hist")]
                    counts += cell["counts"]
                    out += cell["out"]
                histogram = (edges, counts / n, out)
            results[key] = EmpiricalStats(
                n_trials=n_eff, mean=stats["mean"],
                variance=stats["variance"],
                standard_error=stats["standard_error"],
                variance_standard_error=stats["variance_standard_error"],
                n_infinite=n_inf, mgf_at=mgf_at, histogram=histogram)
    return results
