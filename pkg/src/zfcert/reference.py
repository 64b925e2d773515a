"""Published constants that the certificates re-derive or re-check.

Everything here is stored exactly (decimals as exact rationals). Certificates
never take these values on trust: each one is either recomputed from first
principles or checked as an inequality against a certified enclosure.
"""

from __future__ import annotations

from fractions import Fraction as Q

THETA = Q("1.1338")

KAPPA = (
    Q(1), Q(-851, 859), Q(780, 859), Q(-525, 859), Q(171, 859), Q(28, 859), Q(-29, 859),
)
KAPPA_SUM = Q(433, 859)
EFFICIENCY = Q(859, 433)
HYPOTHETICAL_EFFICIENCY = Q(2)
TWO_TERM_KAPPA = (Q(1), Q("-0.438904"))

TRIG_C = (4, -8, 2, 20, -9, -34, 27, 91, -27, -201, 32, 895, 1949, 2389, 1896, 949, 239)
TRIG_NORMALIZER = 14912370
A1 = Q(865534, 497079)
A_SUM = Q(2919857, 828465)

H = Q(3 * 10**12)
T0 = Q(10**10)
K = 16
LOG_N_CUTOFF = 59
PRIME_CUTOFF = 100
POWER_CUTOFF = 15

A0_MAIN = 1 / Q("4.896")
A0_VARIANT = 1 / Q("4.8594")
A0_TABLE_ROW = 1 / Q("4.8596")
LOG_T_MAX = {"4.896": Q("76.47"), "4.8594": Q("56.693")}
VARIANT_A0 = {"4.896": A0_MAIN, "4.8594": A0_VARIANT}
ITERATION_STEP = Q(1, 10**100)

# parameter table: (A0, eta0 digits, sigma0 digits) per column
PARAMETER_TABLE = {
    "4.896": {"A0": A0_TABLE_ROW, "eta0": Q("0.0071093"), "sigma0": Q("0.9935164")},
    "4.8594": {"A0": A0_VARIANT, "eta0": Q("0.0071628"), "sigma0": Q("0.9934675")},
}
MU0 = Q("0.91198")

SLAB_C0 = Q(151, 153)
EPSILON0 = Q(1, 2000)

# numerator p(y) of the boundary certificate, ascending powers of y
P_CERT = {
    0: 112359769561546903428467326544,
    2: -229732179325278720034298507440,
    4: 135673322742635307737680349343,
    6: -4484512641017853031179075270,
    8: -104378137212291977844887868,
    10: 4077560173170236734684710,
    12: 4061245152630328137981,
}
Q_CERT_SCALE = 4012454647232553285540000
# q(y) = scale * prod (y^2 + r) over these shifts (c = SLAB_C0)
Q_CERT_SHIFTS = (Q(1), Q(9), Q(25), 4 * SLAB_C0**2, 16 * SLAB_C0**2, 36 * SLAB_C0**2, 49 * SLAB_C0**2)

TABLE_MP = {
    2: Q("0.23416332"), 3: Q("0.05006283"), 5: Q("0.00735709"), 7: Q("0.00205251"),
    11: Q("0.00039742"), 13: Q("0.00022273"), 17: Q("0.00009071"), 19: Q("0.00006314"),
    23: Q("0.00003427"), 29: Q("0.00001656"), 31: Q("0.00001346"), 37: Q("7.8e-6"),
    41: Q("5.69e-6"), 43: Q("4.91e-6"), 47: Q("3.74e-6"), 53: Q("2.59e-6"),
    59: Q("1.87e-6"), 61: Q("1.69e-6"), 67: Q("1.27e-6"), 71: Q("1.06e-6"),
    73: Q("9.7e-7"), 79: Q("7.7e-7"), 83: Q("6.6e-7"), 89: Q("5.3e-7"), 97: Q("4.1e-7"),
}
SUM_LOG_MP_BOUND = Q("0.23545")
TRIG_LOWER_CONSTANT = Q("0.1186")
F_LOWER_RANGE = Q(59)

W0_DIGITS = Q("5.672787598")
TWO_THETA_COT_DIGITS = Q("1.05923293")
S1_DIGITS = Q("-0.689736127")
S2_DIGITS = Q("-0.818779265")
MOMENT_DIGITS = {
    "c0": Q("0.8763706262"), "c1": Q("0.1200272738"), "c2": Q("0.0203537951"),
    "c3": Q("0.0004382722"), "c*": Q("0.0190417514"),
}
C1_COEFFS = (Q("0.87637"), Q("0.12002"), Q("0.01017"), Q("-0.00073"))
TAYLOR_ENVELOPE = Q(1, 18)

# error polynomials (ascending powers of eta, starting at eta^1)
LOWER_M_GE1 = (Q("-2.939"), Q(11), Q(-3193))
LOWER_M_GE1_INTERMEDIATE_CUBIC = Q(3188)
ERR_SHIFT_MINUS = Q(1126)
ERR_SHIFT_PLUS = Q(1188)
LOWER_F_SHIFTED = (Q("6.848"), Q(15), Q(-708))
LEMMA_63_POLY = (Q("3.909"), Q(26), Q(-3897))

FORD_BOUND_52 = Q(52)
FORD_BOUND_51 = Q(51)
U_INTEGRAL_BOUND = Q(24)
ERR_T0 = Q(199)
ERR_T0_TOTAL = Q(623)
ERR_TH_SQUARE = Q(14)
ERR_TH_CUBE = Q(424)
AGG_T0 = Q(2353)
AGG_TH_SQUARE = Q(53)
AGG_TH_CUBE = Q(1601)
TAIL_SMALL = Q(1, 10**10)
TAIL_BOUND = Q(1, 10**8)
TAIL_TOTAL = Q(1, 10**7)
LEHMAN_COEFF = Q(6, 10**11)
REMAINDER_BOUND = Q(1, 10**10)
K0_DIGAMMA = Q("-0.041")
DIGAMMA_TOTAL = Q("-1.568")
POLE_PER_K = Q(1, 10**12)
POLE_PER_K_SUM = Q(1, 10**11)
POLE_TOTAL = Q(1, 10**10)
TAIL_44 = Q(44)
TAIL_57 = Q("5.7")

ITER_E_SQUARE = Q(187)
ITER_E_CUBE = Q(8013)
C2_COEFFS = (Q("13.47"), Q(-161), Q(-11896))
MU_SHIFT = Q("2.78")
ETA_FLOOR_FACTOR = Q(6)
CUBIC_IN_INV_L = (Q("1.00582"), Q("1.86088"), Q("-4.4106"), Q("-55.0584"))
ENDPOINT_VALUE_DIGITS = Q("1.02928")
FINAL_CONSTANT_DIGITS = Q("0.204248")

LITTLEWOOD = {"4.896": (Q("21.233"), Q("4.896")), "4.8594": (Q("19.62"), Q("4.8594"))}
CROSSOVER_DIGITS = {"4.896": Q("76.463"), "4.8594": Q("56.691")}
BELOW_H_SOURCE = "external verification: all zeta zeros with 0 < t <= 3e12 lie on the critical line"
