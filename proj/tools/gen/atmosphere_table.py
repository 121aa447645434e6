"""Column mass above altitude from the 1976 US Standard Atmosphere.

Below 86 km the layered lapse-rate model gives the pressure; above, the
tabulated standard pressures are used. Column = P / g(z).
Writes altitude_m,column_g_cm2 to stdout.
"""
import math

G0 = 9.80665
R_EARTH = 6356.766e3
R_GAS = 8.31432
M_AIR = 0.0289644
LAYERS = [  # base geopotential height [m], lapse rate [K/m]
    (0.0, -0.0065), (11000.0, 0.0), (20000.0, 0.001), (32000.0, 0.0028),
    (47000.0, 0.0), (51000.0, -0.0028), (71000.0, -0.002), (84852.0, 0.0)]
UPPER = [  # geometric altitude [km], pressure [Pa]
    (90, 0.18359), (100, 3.2011e-2), (110, 7.1042e-3), (120, 2.5381e-3),
    (150, 4.5422e-4), (200, 8.4736e-5), (250, 2.4767e-5), (300, 8.7704e-6),
    (400, 1.4518e-6), (500, 3.0236e-7), (600, 8.2130e-8), (700, 3.1908e-8),
    (800, 1.7036e-8), (900, 1.0873e-8), (1000, 7.5138e-9)]


def lower_pressure(z):
    h = R_EARTH * z / (R_EARTH + z)
    t, p = 288.15, 101325.0
    for i, (hb, lapse) in enumerate(LAYERS):
        top = LAYERS[i + 1][0] if i + 1 < len(LAYERS) else math.inf
        dh = min(h, top) - hb
        if lapse == 0:
            p *= math.exp(-G0 * M_AIR * dh / (R_GAS * t))
        else:
            p *= (t / (t + lapse * dh)) ** (G0 * M_AIR / (R_GAS * lapse))
        t += lapse * dh
        if h <= top:
            return p
    return p


def gravity(z):
    return G0 * (R_EARTH / (R_EARTH + z)) ** 2


rows = [(z * 1000.0, lower_pressure(z * 1000.0)) for z in range(0, 86, 2)]
rows += [(86000.0, lower_pressure(86000.0))]
rows += [(km * 1000.0, p) for km, p in UPPER]
print("altitude_m,column_g_cm2")
for z, p in rows:
    print(f"{z:.0f},{p / gravity(z) / 10.0:.6g}")
