#!/usr/bin/env python3
"""Linear-domain power summation oracle for the interference model.

Frozen expected values for the effective-SINR tests, plus the pre-build
sanity check that the shipped baseline decodes at the top MCS unjammed
and that the capacity arithmetic used in the transmit tests holds.
"""

import math


def effective_sinr(signal, noise, base, gain, jammed):
    if not jammed:
        return signal - noise
    interference = 10 ** ((base + gain) / 10.0) + 10 ** (noise / 10.0)
    return signal - 10.0 * math.log10(interference)


def main():
    print("effective_sinr(20, 0, -10, gain=10, jammed):",
          repr(effective_sinr(20, 0, -10, 10, True)))
    print("effective_sinr(20, -200, 0, gain=20, jammed):",
          repr(effective_sinr(20, -200, 0, 20, True)))
    print("effective_sinr(20, 0, -10, unjammed):",
          repr(effective_sinr(20, 0, -10, 99, False)))

    # Shipped baseline: signal 20 dB over a 0 dB floor, top MCS needs 18 dB.
    baseline = effective_sinr(20, 0, -7.5, 0, False)
    assert baseline >= 18.0, "baseline must decode at the top MCS"
    print("baseline unjammed SINR:", baseline, ">= 18.0 (top MCS ok)")

    # Full-interior grant at the top MCS drains floor(96*1440/8/800) packets.
    cap_bytes = 96 * 1440 // 8
    print("full-interior capacity bytes:", cap_bytes, "-> packets:", cap_bytes // 800)

    # Sweep-band map for the shipped calibration (jammer_base = -7.5 dB,
    # TPC headroom +3): railed SINR per gain and the highest usable MCS.
    thresholds = [-2, 0, 3, 6, 9, 12, 15, 18]
    for gain in range(1, 36, 2):
        sinr = effective_sinr(23, 0, -7.5, gain, True)
        usable = [k for k, t in enumerate(thresholds) if sinr >= t]
        print(f"gain {gain:2d} dB: railed sinr {sinr:7.3f}  max mcs {usable[-1] if usable else None}")


if __name__ == "__main__":
    main()
