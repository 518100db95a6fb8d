#!/usr/bin/env python3
"""Generate the bundled AM1.5 reference solar spectrum table.

Produces data/astm_g173.csv in the four-column ASTM G-173 layout
(wavelength nm; extraterrestrial; global tilt; direct+circumsolar, all
W m-2 nm-1) on the standard 2002-point grid: 280-400 nm at 0.5 nm,
400-1700 nm at 1 nm, 1702 nm, 1705-4000 nm at 5 nm.

The values are a physical stand-in, not the NREL-published table: a
5772 K Planck extraterrestrial curve attenuated through Beer-Lambert
transmittance with Rayleigh scattering, Angstrom aerosol extinction
(AOD 0.084 at 500 nm), ozone Hartley/Huggins/Chappuis bands (0.34
atm-cm), water-vapor bands (1.42 cm precipitable), O2 and CO2 bands,
all evaluated at air mass 1.5. Columns are rescaled so the broadband
integrals match the published table: ETR 1347.9, global tilt 1000.4,
direct+circumsolar 900.1 W/m2 over 280-4000 nm.

Anyone holding the official NREL ASTMG173.csv can drop it in place of
the generated file; the loader accepts both.
"""
import math

import numpy as np

H = 6.62607015e-34
C = 2.99792458e8
KB = 1.380649e-23
T_SUN = 5772.0
R_SUN = 6.957e8
AU = 1.495978707e11


def grid():
    a = np.arange(280.0, 400.0 + 0.25, 0.5)
    b = np.arange(401.0, 1700.0 + 0.5, 1.0)
    c = np.array([1702.0])
    d = np.arange(1705.0, 4000.0 + 2.5, 5.0)
    return np.concatenate([a, b, c, d])


def planck_irradiance(wl_nm):
    lam = wl_nm * 1e-9
    spectral_radiance = (2 * H * C * C / lam**5) / (np.expm1(H * C / (lam * KB * T_SUN)))
    # solid-angle factor for the solar disk at 1 AU, per-nm units
    return spectral_radiance * math.pi * (R_SUN / AU) ** 2 * 1e-9


def gauss(wl, center, width, depth):
    return depth * np.exp(-0.5 * ((wl - center) / width) ** 2)


def optical_depth(wl_nm):
    um = wl_nm / 1000.0
    # Rayleigh scattering, sea-level column
    tau_r = 0.008735 * um ** (-4.08)
    # Angstrom aerosol: tau = beta * lambda^-alpha with tau(500nm) = 0.084
    alpha = 1.14
    beta = 0.084 * 0.5 ** alpha
    tau_a = beta * um ** (-alpha)
    # Ozone: Hartley (strong UV cutoff), Huggins shoulder, Chappuis visible
    du = 0.34  # atm-cm
    tau_o3 = du * (
        gauss(wl_nm, 255.0, 22.0, 300.0)
        + gauss(wl_nm, 310.0, 16.0, 1.2)
        + gauss(wl_nm, 600.0, 90.0, 0.13)
    )
    # Water vapor bands, scaled by 1.42 cm precipitable water
    w = 1.42
    tau_h2o = w * (
        gauss(wl_nm, 724.0, 10.0, 0.12)
        + gauss(wl_nm, 824.0, 12.0, 0.16)
        + gauss(wl_nm, 938.0, 16.0, 0.65)
        + gauss(wl_nm, 1130.0, 22.0, 0.85)
        + gauss(wl_nm, 1380.0, 32.0, 4.5)
        + gauss(wl_nm, 1870.0, 40.0, 5.0)
        + gauss(wl_nm, 2600.0, 90.0, 4.0)
        + gauss(wl_nm, 3200.0, 120.0, 1.8)
    )
    # O2 A-band and CO2 bands
    tau_gas = (
        gauss(wl_nm, 762.0, 3.0, 0.9)
        + gauss(wl_nm, 688.0, 2.0, 0.25)
        + gauss(wl_nm, 2010.0, 25.0, 0.55)
        + gauss(wl_nm, 2700.0, 40.0, 1.0)
    )
    return tau_r + tau_a + tau_o3 + tau_h2o + tau_gas


def main():
    wl = grid()
    am = 1.5
    etr = planck_irradiance(wl)
    etr *= 1347.9 / np.trapezoid(etr, wl)

    direct = etr * np.exp(-optical_depth(wl) * am)
    direct *= 900.1 / np.trapezoid(direct, wl)

    # Diffuse sky: Rayleigh + aerosol scattered light, blue-weighted, with
    # the same molecular absorption bands imprinted at reduced depth.
    um = wl / 1000.0
    tau_scat = 0.008735 * um ** (-4.08) * am + 0.084 * (0.5 ** 1.14) * um ** (-1.14) * am
    scattered = etr * (1.0 - np.exp(-tau_scat)) * np.exp(-0.35 * optical_depth(wl))
    glob = direct + scattered * (1000.4 - 900.1) / np.trapezoid(scattered, wl)
    glob *= 1000.4 / np.trapezoid(glob, wl)
    glob = np.maximum(glob, direct)

    with open("data/astm_g173.csv", "w", newline="\n") as f:
        f.write("AM1.5 reference solar spectrum in the ASTM G-173 four-column layout"
                " (modeled stand-in; regenerate with tools/make_reference_spectrum.py),,,\n")
        f.write("Wvlgth nm,Etr W*m-2*nm-1,Global tilt W*m-2*nm-1,Direct+circumsolar W*m-2*nm-1\n")
        for i in range(len(wl)):
            w = wl[i]
            wtxt = f"{w:.1f}".rstrip("0").rstrip(".") if w != int(w) else f"{int(w)}"
            f.write(f"{wtxt},{etr[i]:.4E},{glob[i]:.4E},{direct[i]:.4E}\n")

    for name, col in [("etr", etr), ("global_tilt", glob), ("direct", direct)]:
        full = np.trapezoid(col, wl)
        mask = (wl >= 280.0) & (wl <= 2500.0)
        clipped = np.trapezoid(col[mask], wl[mask])
        print(f"{name}: integral 280-4000 = {full:.6f} W/m2, 280-2500 = {clipped:.6f} W/m2")
    print(f"grid points: {len(wl)} (280-2500: {int(((wl>=280)&(wl<=2500)).sum())})")


if __name__ == "__main__":
    main()
