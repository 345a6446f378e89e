//! Six-significant-digit formatting for human-readable tables.

use hopf_core::C;

pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = format!("{x:.5e}");
    let mag: i32 = e[e.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if !(-4..6).contains(&mag) {
        format!("{x:.5e}")
    } else {
        format!("{x:.*}", (5 - mag) as usize)
    }
}

pub fn sig6_complex(z: C<f64>) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{} {sign} {}i", sig6(z.re), sig6(z.im.abs()))
}
