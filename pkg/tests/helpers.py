"""Hand-built channel realizations for exactness tests."""

import numpy as np

from damsim.channel import (
    PathParams,
    ScenarioChannel,
    ScenarioConfig,
    UeChannel,
    array_response,
)


def make_channel(
    delays_per_ue,
    num_antennas=8,
    gains=None,
    aods=None,
    transmit_power_w=1.0,
    noise_power_w=1e-3,
):
    """Channel with pinned delays and optional pinned gains and angles.

    ``delays_per_ue`` is a list of per-UE delay lists; gains default to
    1 and angles spread over (0, pi) deterministically.
    """
    num_ues = len(delays_per_ue)
    paths_per_ue = tuple(len(d) for d in delays_per_ue)
    cfg = ScenarioConfig(
        num_antennas=num_antennas,
        num_ues=num_ues,
        paths_per_ue=paths_per_ue,
        transmit_power_w=transmit_power_w,
        noise_power_w=noise_power_w,
        max_delay=int(max(max(d) for d in delays_per_ue)),
    )
    ues = []
    blocks = []
    counter = 1
    for k, delays in enumerate(delays_per_ue):
        paths = []
        cols = []
        for l, delay in enumerate(delays):
            gain = complex(gains[k][l]) if gains is not None else 1.0 + 0.0j
            if aods is not None:
                aod = float(aods[k][l])
            else:
                aod = np.pi * counter / (sum(paths_per_ue) + 1)
                counter += 1
            paths.append(PathParams(gain=gain, aod=aod, delay=int(delay)))
            cols.append(gain * array_response(aod, num_antennas))
        steering = np.stack(cols, axis=1)
        ues.append(UeChannel(paths=tuple(paths), steering=steering))
        blocks.append(steering)
    return ScenarioChannel(config=cfg, ues=tuple(ues), matrix=np.concatenate(blocks, axis=1))
