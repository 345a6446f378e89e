#![allow(dead_code)]

use hopf_core::{assemble_rhs, CVec, Frame, Ladder, LadderOptions, C};
use wgss::{epsilon_critical, model, WgssParams};

/// Five-digit coordinates of the codimension-4 point as printed.
pub const Q_PRINTED: (f64, f64, f64) = (0.93593, 1.02753, 0.90164);

/// The printed point, placed on the critical hypersurface.
pub fn golden_params() -> WgssParams {
    let (b, a, k) = Q_PRINTED;
    WgssParams::new(b, a, epsilon_critical(b, a, k), k).unwrap()
}

pub fn golden(opts: LadderOptions) -> (Frame, Ladder) {
    let p = golden_params();
    let f = model::frame(&p, 9).unwrap();
    let l = hopf_core::run_ladder(&f, opts).unwrap();
    (f, l)
}

pub fn c(re: f64, im: f64) -> C<f64> {
    C::new(re, im)
}

pub const G_PRINTED: [(f64, f64); 4] = [
    (0.0, -3.91814),
    (0.0, -153.21726),
    (0.0, -22328.21224),
    (-22071.41115, -5991090.52119),
];
pub const L4_PRINTED: f64 = -7.66368;

/// Printed `(j, k, h_jk)` vectors at the rounded point.
pub fn h_printed() -> Vec<(usize, usize, [C<f64>; 3])> {
    vec![
        (1, 1, [c(-2.65769, 0.0), c(0.0, 0.0), c(0.19650, 0.0)]),
        (
            2,
            0,
            [
                c(-4.11029, -0.18429),
                c(0.13416, -2.99241),
                c(0.09159, -3.36395),
            ],
        ),
        (
            2,
            1,
            [
                c(3.24775, 1.67247),
                c(-4.52694, 1.18222),
                c(4.85950, 3.71541),
            ],
        ),
        (
            3,
            2,
            [
                c(178.24934, 273.66781),
                c(-233.17715, 26.70966),
                c(395.89053, 272.77265),
            ],
        ),
        (
            4,
            3,
            [
                c(26579.27090, 62051.16515),
                c(-36944.56779, 2499.10743),
                c(78144.32459, 54070.14624),
            ],
        ),
    ]
}

/// `(kappa, alpha, beta, l3)` rows of the printed tables.
pub const C1_TABLE: [(f64, f64, f64, f64); 11] = [
    (0.45, 0.33319, 0.72216, -0.91310),
    (0.5, 0.42968, 0.71770, -0.92567),
    (0.55, 0.50934, 0.71257, -0.88152),
    (0.6, 0.57913, 0.70665, -0.82064),
    (0.65, 0.64241, 0.69983, -0.75810),
    (0.7, 0.70113, 0.69201, -0.70006),
    (0.75, 0.75659, 0.68309, -0.64900),
    (0.8, 0.80972, 0.67302, -0.60580),
    (0.85, 0.86120, 0.66177, -0.57054),
    (0.9, 0.91154, 0.64940, -0.54288),
    (0.95, 0.96114, 0.63600, -0.52217),
];
pub const C2_TABLE: [(f64, f64, f64, f64); 11] = [
    (0.0, 0.85050, 0.86828, 0.39050),
    (0.2, 0.90524, 0.87760, 0.46294),
    (0.3, 0.93123, 0.88397, 0.50684),
    (0.4, 0.95511, 0.89159, 0.55538),
    (0.5, 0.97602, 0.90042, 0.60637),
    (0.6, 0.99330, 0.91029, 0.65253),
    (0.7, 1.00674, 0.92071, 0.66963),
    (0.8, 1.01697, 0.93045, 0.56860),
    (0.9, 1.02731, 0.93592, 0.01665),
    (0.92, 1.03020, 0.93585, -0.20674),
    (0.98, 1.04319, 0.93201, -1.09289),
];

/// Printed gradients of `l1, l2, l3` at Q, components in `(beta, kappa, alpha)` order.
pub const GRADS_PRINTED: [[f64; 3]; 3] = [
    [-0.46264, 0.13437, -0.97565],
    [-12.44701, 2.66791, -19.19345],
    [-266.77145, 41.80505, -372.84969],
];
pub const DET_PRINTED: f64 = -33.31133;

// Printed right-hand sides, transcribed term by term; arguments are `q`,
// `h_jk` and their conjugates (suffix `b`).

pub const H21: &str = "\
    +1 C(q,q,qb) +1 B(qb,h20) +2 B(q,h11) \
";
pub const H32: &str = "\
    +6 B(h11,h21) +1 B(h20b,h30) +3 B(h21b,h20) +3 B(q,h22) +2 B(qb,h31) +6 C(q,h11,h11) +3 \
    C(q,h20b,h20) +3 C(q,q,h21b) +6 C(q,qb,h21) +6 C(qb,h20,h11) +1 C(qb,qb,h30) +1 D(q,q,q,h20b) +6 \
    D(q,q,qb,h11) +3 D(q,qb,qb,h20) +1 E(q,q,q,qb,qb) \
";

pub const H43: &str = "\
    +12 B(h11,h32) +6 B(h20,h32b) +3 B(h20b,h41) +18 B(h21,h22) +12 B(h21b,h31) +4 B(h30,h31b) +1 \
    B(h30b,h40) +4 B(q,h33) +3 B(qb,h42) +36 C(h11,h11,h21) +36 C(h11,h20,h21b) +12 C(h11,h20b,h30) \
    +3 C(h20,h20,h30b) +18 C(h20,h20b,h21) +36 C(q,h11,h22) +12 C(q,h20,h31b) +12 C(q,h20b,h31) +36 \
    C(q,h21,h21b) +4 C(q,h30,h30b) +6 C(q,q,h32b) +12 C(q,qb,h32) +24 C(qb,h11,h31) +18 \
    C(qb,h20,h22) +3 C(qb,h20b,h40) +18 C(qb,h21,h21) +12 C(qb,h21b,h30) +3 C(qb,qb,h41) +24 \
    D(q,h11,h11,h11) +36 D(q,h11,h20,h20b) +36 D(q,q,h11,h21b) +6 D(q,q,h20,h30b) +18 \
    D(q,q,h20b,h21) +4 D(q,q,q,h31b) +18 D(q,q,qb,h22) +72 D(q,qb,h11,h21) +36 D(q,qb,h20,h21b) +12 \
    D(q,qb,h20b,h30) +12 D(q,qb,qb,h31) +36 D(qb,h11,h11,h20) +9 D(qb,h20,h20,h20b) +12 \
    D(qb,qb,h11,h30) +18 D(qb,qb,h20,h21) +1 D(qb,qb,qb,h40) +12 E(q,q,q,h11,h20b) +1 \
    E(q,q,q,q,h30b) +12 E(q,q,q,qb,h21b) +36 E(q,q,qb,h11,h11) +18 E(q,q,qb,h20,h20b) +18 \
    E(q,q,qb,qb,h21) +36 E(q,qb,qb,h11,h20) +4 E(q,qb,qb,qb,h30) +3 E(qb,qb,qb,h20,h20) +3 \
    K(q,q,q,q,qb,h20b) +12 K(q,q,q,qb,qb,h11) +6 K(q,q,qb,qb,qb,h20) +1 L(q,q,q,q,qb,qb,qb) \
";

pub const H54: &str = "\
    +20 B(h11,h43) +10 B(h20,h43b) +6 B(h20b,h52) +40 B(h21,h33) +30 B(h21b,h42) +60 B(h22,h32) +10 \
    B(h30,h42b) +4 B(h30b,h51) +40 B(h31,h32b) +20 B(h31b,h41) +5 B(h40,h41b) +1 B(h40b,h50) +5 \
    B(q,h44) +4 B(qb,h53) +120 C(h11,h11,h32) +60 C(h11,h20b,h41) +360 C(h11,h21,h22) +240 \
    C(h11,h21b,h31) +80 C(h11,h30,h31b) +20 C(h11,h30b,h40) +120 C(h20,h11,h32b) +15 C(h20,h20,h41b) \
    +60 C(h20,h20b,h32) +120 C(h20,h21,h31b) +180 C(h20,h21b,h22) +10 C(h20,h30,h40b) +40 \
    C(h20,h30b,h31) +3 C(h20b,h20b,h50) +120 C(h20b,h21,h31) +30 C(h20b,h21b,h40) +60 \
    C(h20b,h30,h22) +180 C(h21,h21,h21b) +60 C(h21b,h21b,h30) +40 C(h30,h21,h30b) +80 C(q,h11,h33) \
    +30 C(q,h20,h42b) +30 C(q,h20b,h42) +120 C(q,h21,h32b) +120 C(q,h21b,h32) +90 C(q,h22,h22) +20 \
    C(q,h30,h41b) +20 C(q,h30b,h41) +80 C(q,h31,h31b) +5 C(q,h40,h40b) +10 C(q,q,h43b) +20 \
    C(q,qb,h43) +60 C(qb,h11,h42) +40 C(qb,h20,h33) +12 C(qb,h20b,h51) +120 C(qb,h21,h32) +60 \
    C(qb,h21b,h41) +40 C(qb,h30,h32b) +4 C(qb,h30b,h50) +120 C(qb,h31,h22) +20 C(qb,h40,h31b) +6 \
    C(qb,qb,h52) +240 D(h11,h11,h11,h21) +120 D(h11,h11,h20b,h30) +360 D(h20,h11,h11,h21b) +360 \
    D(h20,h11,h20b,h21) +60 D(h20,h20,h11,h30b) +90 D(h20,h20,h20b,h21b) +30 D(h20,h20b,h20b,h30) \
    +360 D(q,h11,h11,h22) +240 D(q,h11,h20b,h31) +720 D(q,h11,h21,h21b) +80 D(q,h11,h30,h30b) +240 \
    D(q,h20,h11,h31b) +15 D(q,h20,h20,h40b) +180 D(q,h20,h20b,h22) +120 D(q,h20,h21,h30b) +180 \
    D(q,h20,h21b,h21b) +15 D(q,h20b,h20b,h40) +180 D(q,h20b,h21,h21) +120 D(q,h20b,h30,h21b) +120 \
    D(q,q,h11,h32b) +30 D(q,q,h20,h41b) +60 D(q,q,h20b,h32) +120 D(q,q,h21,h31b) +180 \
    D(q,q,h21b,h22) +10 D(q,q,h30,h40b) +40 D(q,q,h30b,h31) +10 D(q,q,q,h42b) +40 D(q,q,qb,h33) +240 \
    D(q,qb,h11,h32) +120 D(q,qb,h20,h32b) +60 D(q,qb,h20b,h41) +360 D(q,qb,h21,h22) +240 \
    D(q,qb,h21b,h31) +80 D(q,qb,h30,h31b) +20 D(q,qb,h30b,h40) +30 D(q,qb,qb,h42) +240 \
    D(qb,h11,h11,h31) +60 D(qb,h11,h20b,h40) +360 D(qb,h11,h21,h21) +240 D(qb,h11,h30,h21b) +360 \
    D(qb,h20,h11,h22) +60 D(qb,h20,h20,h31b) +120 D(qb,h20,h20b,h31) +360 D(qb,h20,h21,h21b) +40 \
    D(qb,h20,h30,h30b) +120 D(qb,h20b,h30,h21) +60 D(qb,qb,h11,h41) +60 D(qb,qb,h20,h32) +6 \
    D(qb,qb,h20b,h50) +120 D(qb,qb,h21,h31) +30 D(qb,qb,h21b,h40) +60 D(qb,qb,h30,h22) +4 \
    D(qb,qb,qb,h51) +120 E(q,h11,h11,h11,h11) +360 E(q,h20,h11,h11,h20b) +45 E(q,h20,h20,h20b,h20b) \
    +360 E(q,q,h11,h11,h21b) +360 E(q,q,h11,h20b,h21) +120 E(q,q,h20,h11,h30b) +180 \
    E(q,q,h20,h20b,h21b) +30 E(q,q,h20b,h20b,h30) +80 E(q,q,q,h11,h31b) +10 E(q,q,q,h20,h40b) +60 \
    E(q,q,q,h20b,h22) +40 E(q,q,q,h21,h30b) +60 E(q,q,q,h21b,h21b) +5 E(q,q,q,q,h41b) +40 \
    E(q,q,q,qb,h32b) +360 E(q,q,qb,h11,h22) +120 E(q,q,qb,h20,h31b) +120 E(q,q,qb,h20b,h31) +360 \
    E(q,q,qb,h21,h21b) +40 E(q,q,qb,h30,h30b) +60 E(q,q,qb,qb,h32) +720 E(q,qb,h11,h11,h21) +240 \
    E(q,qb,h11,h20b,h30) +720 E(q,qb,h20,h11,h21b) +60 E(q,qb,h20,h20,h30b) +360 \
    E(q,qb,h20,h20b,h21) +240 E(q,qb,qb,h11,h31) +180 E(q,qb,qb,h20,h22) +30 E(q,qb,qb,h20b,h40) \
    +180 E(q,qb,qb,h21,h21) +120 E(q,qb,qb,h30,h21b) +20 E(q,qb,qb,qb,h41) +240 \
    E(qb,h20,h11,h11,h11) +180 E(qb,h20,h20,h11,h20b) +120 E(qb,qb,h11,h11,h30) +360 \
    E(qb,qb,h20,h11,h21) +90 E(qb,qb,h20,h20,h21b) +60 E(qb,qb,h20,h20b,h30) +20 E(qb,qb,qb,h11,h40) \
    +40 E(qb,qb,qb,h20,h31) +40 E(qb,qb,qb,h30,h21) +1 E(qb,qb,qb,qb,h50) +120 K(q,q,q,h11,h11,h20b) \
    +30 K(q,q,q,h20,h20b,h20b) +20 K(q,q,q,q,h11,h30b) +30 K(q,q,q,q,h20b,h21b) +1 K(q,q,q,q,q,h40b) \
    +20 K(q,q,q,q,qb,h31b) +240 K(q,q,q,qb,h11,h21b) +40 K(q,q,q,qb,h20,h30b) +120 \
    K(q,q,q,qb,h20b,h21) +60 K(q,q,q,qb,qb,h22) +240 K(q,q,qb,h11,h11,h11) +360 \
    K(q,q,qb,h20,h11,h20b) +360 K(q,q,qb,qb,h11,h21) +180 K(q,q,qb,qb,h20,h21b) +60 \
    K(q,q,qb,qb,h20b,h30) +40 K(q,q,qb,qb,qb,h31) +360 K(q,qb,qb,h20,h11,h11) +90 \
    K(q,qb,qb,h20,h20,h20b) +80 K(q,qb,qb,qb,h11,h30) +120 K(q,qb,qb,qb,h20,h21) +5 \
    K(q,qb,qb,qb,qb,h40) +60 K(qb,qb,qb,h20,h20,h11) +10 K(qb,qb,qb,qb,h20,h30) +3 \
    L(q,q,q,q,q,h20b,h20b) +4 L(q,q,q,q,q,qb,h30b) +60 L(q,q,q,q,qb,h11,h20b) +30 \
    L(q,q,q,q,qb,qb,h21b) +120 L(q,q,q,qb,qb,h11,h11) +60 L(q,q,q,qb,qb,h20,h20b) +40 \
    L(q,q,q,qb,qb,qb,h21) +120 L(q,q,qb,qb,qb,h20,h11) +10 L(q,q,qb,qb,qb,qb,h30) +15 \
    L(q,qb,qb,qb,qb,h20,h20) +6 M(q,q,q,q,q,qb,qb,h20b) +20 M(q,q,q,q,qb,qb,qb,h11) +10 \
    M(q,q,q,qb,qb,qb,qb,h20) +1 N(q,q,q,q,q,qb,qb,qb,qb) \
";

/// Transport terms `(coef, m, conjugate, j, k)` meaning `coef * G_{m+1,m} h_jk`
/// (`conj(G)` when flagged). The last display prints none; they follow from
/// matching `w^5 w̄^4` in `H_w g + H_w̄ ḡ`.
pub const TRANSPORT: [(usize, &[(f64, usize, bool, usize, usize)]); 4] = [
    (2, &[]),
    (3, &[(6.0, 1, false, 2, 1), (3.0, 1, true, 2, 1)]),
    (
        4,
        &[
            (18.0, 1, false, 3, 2),
            (12.0, 1, true, 3, 2),
            (12.0, 2, false, 2, 1),
            (6.0, 2, true, 2, 1),
        ],
    ),
    (
        5,
        &[
            (40.0, 1, false, 4, 3),
            (30.0, 1, true, 4, 3),
            (60.0, 2, false, 3, 2),
            (40.0, 2, true, 3, 2),
            (20.0, 3, false, 2, 1),
            (10.0, 3, true, 2, 1),
        ],
    ),
];

pub fn display(j: usize) -> &'static str {
    [H21, H32, H43, H54][j - 2]
}

fn arg(lad: &Ladder, name: &str) -> (CVec, (usize, usize)) {
    let (core, bar) = match name.strip_suffix('b') {
        Some(s) => (s, true),
        None => (name, false),
    };
    let (a, b) = match core {
        "q" => (1, 0),
        _ => {
            let d = core.strip_prefix('h').unwrap().as_bytes();
            ((d[0] - b'0') as usize, (d[1] - b'0') as usize)
        }
    };
    let (a, b) = if bar { (b, a) } else { (a, b) };
    (
        lad.h(a, b)
            .unwrap_or_else(|| panic!("missing h_{a}{b}"))
            .clone(),
        (a, b),
    )
}

/// Parsed display: `(coefficient, form order, argument names)`.
pub fn terms(text: &str) -> Vec<(f64, usize, Vec<String>)> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let open = rest.find('(').unwrap();
        let close = rest.find(')').unwrap();
        let head: Vec<&str> = rest[..open].split_whitespace().collect();
        let coef: f64 = head[0].parse().unwrap();
        let order = match head[1] {
            "B" => 2,
            "C" => 3,
            "D" => 4,
            "E" => 5,
            "K" => 6,
            "L" => 7,
            "M" => 8,
            "N" => 9,
            other => panic!("unknown form {other}"),
        };
        let args = rest[open + 1..close]
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        out.push((coef, order, args));
        rest = rest[close + 1..].trim();
    }
    out
}

/// `H_{j, j-1}` from the display for `j` in 2..=5, with transport terms.
pub fn hand_coded(frame: &Frame, lad: &Ladder, j: usize) -> CVec {
    let mut acc = CVec::zeros(frame.dim());
    for (coef, order, names) in terms(display(j)) {
        let args: Vec<(CVec, (usize, usize))> = names.iter().map(|n| arg(lad, n)).collect();
        let deg = args.iter().fold((0, 0), |s, (_, d)| (s.0 + d.0, s.1 + d.1));
        assert_eq!(
            deg,
            (j, j - 1),
            "term {coef} {names:?} has the wrong degree"
        );
        assert_eq!(args.len(), order);
        let refs: Vec<&CVec> = args.iter().map(|a| &a.0).collect();
        let v = frame.jet.eval_form(order, &refs).unwrap();
        acc = &acc + &v.scale(C::new(coef, 0.0));
    }
    for &(coef, m, bar, a, b) in TRANSPORT[j - 2].1 {
        let g = lad.g(m).unwrap();
        let g = if bar { g.conj() } else { g };
        acc = &acc - &lad.h(a, b).unwrap().scale(g * coef);
    }
    acc
}

/// Largest componentwise relative gap between the display and the generic expander.
pub fn display_gap(frame: &Frame, lad: &Ladder, j: usize) -> f64 {
    let mine = hand_coded(frame, lad, j);
    let generic = assemble_rhs(frame, lad, j, j - 1).unwrap();
    (&mine - &generic).max_abs() / generic.max_abs()
}
