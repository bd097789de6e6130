"""Spectral and wave-shape analysis of recorded runs.

The power spectral density uses Welch averaging over 50%-overlapping
Hann-tapered segments, transformed with the in-repo radix-2 transform
below; power-law structure is read off as an ordinary least-squares
slope in log-log coordinates.  Wave events are large excursions of the
activity trace classified by their shape: a spike retraces quickly on
both sides, a sawtooth rises fast and decays gradually, and a flat-top
pulse (fast rise, long plateau, fast fall: the shape plain oscillation
produces) is deliberately not an event.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .sim_core import SimParams

__all__ = [
    "RunSeries",
    "Spectrum",
    "WaveEvent",
    "radix2_dft",
    "psd",
    "fit_loglog_slope",
    "detect_events",
    "summarize",
]

# Event-shape constants: an event closes once 75% of its amplitude is
# retraced, and a decay that spends at least 80% of its samples within
# the top quarter of the amplitude is a plateau pulse, not a wave.
RETRACE_FRACTION = 0.25
PLATEAU_LEVEL_FRACTION = 0.75
PLATEAU_TIME_FRACTION = 0.8


@dataclass
class RunSeries:
    """Recorded trajectory: step numbers, cluster and active-molecule
    counts, the parameter set that produced it, and the noise probability
    in effect at each recorded step."""

    t: np.ndarray
    cluster_count: np.ndarray
    active_count: np.ndarray
    params_snapshot: Optional[SimParams]
    noise_trace: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.t)
        if not (len(self.cluster_count) == len(self.active_count) == len(self.noise_trace) == n):
            raise ValueError("series arrays must share one length")


@dataclass(frozen=True)
class Spectrum:
    """One-sided PSD: frequencies in cycles/step (DC dropped), power per
    unit frequency, and the number of averaged segments."""

    freq: np.ndarray
    power: np.ndarray
    n_segments: int


@dataclass(frozen=True)
class WaveEvent:
    """One classified excursion; kind is spike_up, spike_down, or
    sawtooth.  Times are in recorded-step units with
    t_start < t_peak <= t_end, and amplitude is positive."""

    kind: str
    t_start: int
    t_peak: int
    t_end: int
    amplitude: float


def radix2_dft(x: np.ndarray) -> np.ndarray:
    """Iterative radix-2 Cooley-Tukey transform along the last axis.

    The length must be a power of two.  Matches the plain transform
    definition X[k] = sum_n x[n] exp(-2j pi k n / N).
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    if n == 0 or n & (n - 1):
        raise ValueError(f"transform length must be a power of two, got {n}")
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    y = x[..., rev]
    half = 1
    while half < n:
        w = np.exp(-1j * np.pi * np.arange(half) / half)
        y = y.reshape(x.shape[:-1] + (n // (2 * half), 2, half))
        t = y[..., 1, :] * w
        y = np.concatenate([y[..., 0, :] + t, y[..., 0, :] - t], axis=-1)
        half *= 2
    return y.reshape(x.shape)


def psd(series: np.ndarray) -> Spectrum:
    """Welch power spectral density of a real series at unit sample rate.

    The global mean is removed, the series is cut into 50%-overlapping
    Hann-windowed segments whose length is the largest power of two at
    most a quarter of the series, and squared magnitudes are averaged.
    Normalization makes the one-sided density integrate to the series
    variance (DC excluded); input shorter than 256 samples raises.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("psd expects a 1-D series")
    n = x.size
    if n < 256:
        raise ValueError(f"psd needs at least 256 samples, got {n}")
    seg = 1 << int(np.floor(np.log2(n // 4)))
    hop = seg // 2
    n_segments = (n - seg) // hop + 1
    x = x - x.mean()
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(seg) / seg)
    starts = hop * np.arange(n_segments)
    frames = x[starts[:, None] + np.arange(seg)[None, :]] * window
    spec = radix2_dft(frames)[:, : seg // 2 + 1]
    raw = (spec.real**2 + spec.imag**2).mean(axis=0)
    power = raw / (window**2).sum()  # density at unit sample rate
    power[1:-1] *= 2.0  # fold the negative frequencies, Nyquist excluded
    freq = np.arange(1, seg // 2 + 1) / seg
    return Spectrum(freq=freq, power=power[1:], n_segments=n_segments)


def fit_loglog_slope(spectrum: Spectrum, f_lo: float, f_hi: float) -> tuple:
    """OLS slope and its standard error of log10 power vs log10 frequency
    over the band [f_lo, f_hi].  The band must hold at least 8 bins with
    positive power."""
    if not 0 < f_lo < f_hi:
        raise ValueError(f"need 0 < f_lo < f_hi, got [{f_lo}, {f_hi}]")
    pick = (spectrum.freq >= f_lo) & (spectrum.freq <= f_hi) & (spectrum.power > 0)
    n = int(pick.sum())
    if n < 8:
        raise ValueError(
            f"band [{f_lo}, {f_hi}] holds {n} usable bins, need at least 8"
        )
    lx = np.log10(spectrum.freq[pick])
    ly = np.log10(spectrum.power[pick])
    lx_c = lx - lx.mean()
    sxx = float(lx_c @ lx_c)
    slope = float(lx_c @ ly) / sxx
    resid = ly - ly.mean() - slope * lx_c
    stderr = float(np.sqrt(resid @ resid / (n - 2) / sxx))
    return slope, stderr


def _trailing_extreme(x: np.ndarray, window: int, pad_value: float, fn) -> np.ndarray:
    pad = np.full(window - 1, pad_value)
    padded = np.concatenate([pad, x])
    return fn(np.lib.stride_tricks.sliding_window_view(padded, window), axis=1)


def _scan_trace(x: np.ndarray, rise_window: int, fall_window: int,
                min_amplitude: float) -> list:
    """Excursion scanner over a raw trace; times are sample indices."""
    n = x.size
    events = []
    if n < 2:
        return events
    w = rise_window + 1
    tmin = _trailing_extreme(x, w, np.inf, np.min)
    tmax = _trailing_extreme(x, w, -np.inf, np.max)
    j = 1
    while j < n:
        up_amp = x[j] - tmin[j]
        down_amp = tmax[j] - x[j]
        if up_amp < min_amplitude and down_amp < min_amplitude:
            j += 1
            continue
        upward = up_amp >= down_amp
        y = x if upward else -x
        lo = max(0, j - rise_window)
        win = y[lo:j + 1]
        t_start = lo + int(np.flatnonzero(win == win.min())[-1])
        hi = min(n, j + rise_window + 1)
        t_peak = j + int(np.argmax(y[j:hi]))
        base = y[t_start]
        amplitude = y[t_peak] - base
        retrace_level = base + RETRACE_FRACTION * amplitude
        high_level = base + PLATEAU_LEVEL_FRACTION * amplitude
        t_end = None
        high_samples = 0
        u = t_peak + 1
        while u < n:
            if y[u] <= retrace_level:
                t_end = u
                break
            if y[u] >= high_level:
                high_samples += 1
            u += 1
        if t_end is None:
            # Ran off the end mid-event: only a clear plateau is worth
            # consuming; anything else is left unclassified.
            j = n
            continue
        decay = t_end - t_peak
        if decay <= fall_window:
            kind = "spike_up" if upward else "spike_down"
        elif high_samples >= PLATEAU_TIME_FRACTION * decay:
            j = t_end + 1  # flat-top oscillation pulse, not a wave
            continue
        else:
            kind = "sawtooth"
        events.append(
            WaveEvent(
                kind=kind,
                t_start=t_start,
                t_peak=t_peak,
                t_end=t_end,
                amplitude=float(amplitude),
            )
        )
        j = t_end + 1
    return events


def detect_events(series: RunSeries, rise_window: int, fall_window: int,
                  min_amplitude: float) -> list:
    """Classified excursions of the active-molecule trace.

    ``rise_window`` bounds how many recorded samples a qualifying rise
    may span, ``fall_window`` how many the fall of a spike may span, and
    ``min_amplitude`` the excursion size in molecules.  Event times are
    reported in the series' step units.  Negating the trace swaps
    spike_up and spike_down and keeps sawtooth events sawtooth.
    """
    if rise_window < 1 or fall_window < 1:
        raise ValueError("rise_window and fall_window must be >= 1")
    if min_amplitude < 1:
        raise ValueError(f"min_amplitude must be >= 1, got {min_amplitude}")
    raw = _scan_trace(
        np.asarray(series.active_count, dtype=np.float64),
        rise_window,
        fall_window,
        float(min_amplitude),
    )
    t = np.asarray(series.t)
    return [
        WaveEvent(
            kind=e.kind,
            t_start=int(t[e.t_start]),
            t_peak=int(t[e.t_peak]),
            t_end=int(t[e.t_end]),
            amplitude=e.amplitude,
        )
        for e in raw
    ]


def summarize(series: RunSeries, events: list, spectrum: Optional[Spectrum],
              fit_band: tuple = (1e-3, 1e-1)) -> dict:
    """JSON-ready run summary: event counts and spike fraction, the
    log-log PSD slope over the configured band, and the range of both
    traces."""
    counts = {"spike_up": 0, "spike_down": 0, "sawtooth": 0}
    for e in events:
        counts[e.kind] += 1
    total = sum(counts.values())
    spikes = counts["spike_up"] + counts["spike_down"]
    psd_block = None
    if spectrum is not None:
        slope, stderr = fit_loglog_slope(spectrum, *fit_band)
        psd_block = {
            "slope": slope,
            "stderr": stderr,
            "f_lo": fit_band[0],
            "f_hi": fit_band[1],
            "n_segments": spectrum.n_segments,
        }
    def trace_stats(a):
        a = np.asarray(a)
        return {
            "min": int(a.min()),
            "max": int(a.max()),
            "mean": float(a.mean()),
        }
    return {
        "events": {
            **counts,
            "total": total,
            "spike_fraction": (spikes / total) if total else 0.0,
        },
        "psd": psd_block,
        "cluster_count": trace_stats(series.cluster_count),
        "active_count": trace_stats(series.active_count),
        "params": (
            series.params_snapshot.to_dict() if series.params_snapshot else None
        ),
    }
