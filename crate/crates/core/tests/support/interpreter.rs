//! Gate-by-gate replay of exported circuit text, independent of the
//! diagonal-evolution simulator.

use qmarko::Complex64;

fn qubit(token: &str) -> usize {
    let inner = token.trim().trim_start_matches("q[").trim_end_matches(']');
    inner.parse().unwrap_or_else(|_| panic!("bad qubit operand {token:?}"))
}

fn angle(head: &str) -> f64 {
    let open = head.find('(').expect("angle");
    head[open + 1..head.len() - 1].parse().expect("numeric angle")
}

fn bit(x: usize, q: usize) -> bool {
    (x >> q) & 1 == 1
}

/// Single-qubit 2x2 unitary applied to `target`, optionally only where
/// `control` is 1.
fn apply_1q(amps: &mut [Complex64], target: usize, u: [[Complex64; 2]; 2], control: Option<usize>) {
    for x in 0..amps.len() {
        if bit(x, target) || control.is_some_and(|c| !bit(x, c)) {
            continue;
        }
        let y = x | (1 << target);
        let (a0, a1) = (amps[x], amps[y]);
        amps[x] = u[0][0] * a0 + u[0][1] * a1;
        amps[y] = u[1][0] * a0 + u[1][1] * a1;
    }
}

/// Runs `text` on `|0...0>` and returns the final amplitudes.
pub fn replay(text: &str) -> Vec<Complex64> {
    let mut amps: Vec<Complex64> = Vec::new();
    for raw in text.lines() {
        let line = raw.trim().trim_end_matches(';');
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        let (head, operands) = line.split_once(' ').unwrap_or((line, ""));
        let ops: Vec<usize> =
            if operands.is_empty() { Vec::new() } else { operands.split(',').map(qubit).collect() };
        let name = head.split('(').next().unwrap();
        match name {
            "qreg" => {
                let m = qubit(operands);
                amps = vec![Complex64::new(0.0, 0.0); 1 << m];
                amps[0] = Complex64::new(1.0, 0.0);
            }
            "h" => {
                let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                apply_1q(&mut amps, ops[0], [[r, r], [r, -r]], None);
            }
            "gphase" => {
                let phase = Complex64::from_polar(1.0, angle(head));
                amps.iter_mut().for_each(|a| *a *= phase);
            }
            "rz" => {
                let t = angle(head);
                let z = Complex64::new(0.0, 0.0);
                let u = [[Complex64::from_polar(1.0, -t / 2.0), z], [z, Complex64::from_polar(1.0, t / 2.0)]];
                apply_1q(&mut amps, ops[0], u, None);
            }
            "rzz" => {
                let t = angle(head);
                for (x, a) in amps.iter_mut().enumerate() {
                    let parity = if bit(x, ops[0]) == bit(x, ops[1]) { 1.0 } else { -1.0 };
                    *a *= Complex64::from_polar(1.0, -t / 2.0 * parity);
                }
            }
            "rx" | "crx" => {
                let t = angle(head);
                let c = Complex64::new((t / 2.0).cos(), 0.0);
                let s = Complex64::new(0.0, -(t / 2.0).sin());
                let u = [[c, s], [s, c]];
                if name == "rx" {
                    apply_1q(&mut amps, ops[0], u, None);
                } else {
                    apply_1q(&mut amps, ops[1], u, Some(ops[0]));
                }
            }
            other => panic!("unknown gate {other:?}"),
        }
    }
    amps
}
