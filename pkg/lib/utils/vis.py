# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def save_waveform_plot(record, file_name, cycles=None):
    '''
    Phase capacitor voltages against the phase references, plus the applied
    vector index underneath.
    '''
    n = record.n_steps
    if cycles is not None:
        n = min(n, int(round(cycles / (record.freq * record.ts))))
    t_ms = record.time[:n] * 1e3
    v = record.phase("v_c")[:n]
    ref = record.phase("v_ref")[:n]

    fig, (ax_v, ax_i) = plt.subplots(
        2, 1, sharex=True, figsize=(10, 6), gridspec_kw=dict(height_ratios=[3, 1]))
    for j, name in enumerate("abc"):
        line, = ax_v.plot(t_ms, v[:, j], lw=0.8, label=f"v_c{name}")
        ax_v.plot(t_ms, ref[:, j], lw=0.6, ls="--", color=line.get_color())
    ax_v.set_ylabel("V")
    ax_v.set_title(f"{record.scenario_id} ({record.controller})")
    ax_v.legend(loc="upper right", fontsize=8)

    ax_i.step(t_ms, record.index[:n], where="post", lw=0.6)
    ax_i.set_ylabel("vector")
    ax_i.set_xlabel("t [ms]")
    ax_i.set_yticks(range(7))

    fig.tight_layout()
    fig.savefig(file_name, dpi=120)
    plt.close(fig)


def save_thd_plot(report, file_name, title=""):
    fig, ax = plt.subplots(figsize=(8, 3))
    ax.bar(report.orders, 100.0 * report.amplitudes / report.fundamental_amplitude)
    ax.set_xlabel("harmonic order")
    ax.set_ylabel("% of fundamental")
    ax.set_title(f"{title} THD = {report.thd_percent:.2f}%".strip())
    fig.tight_layout()
    fig.savefig(file_name, dpi=120)
    plt.close(fig)
