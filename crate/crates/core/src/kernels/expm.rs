use super::{all_finite, norm1, ComplexMatrix, C64};
use crate::{Error, Result};

// Padé degrees and their 1-norm bounds (Higham 2005, double precision).
const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(M t)` by scaling and squaring around a diagonal Padé approximant.
pub fn expm(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("expm time"));
    }
    if !all_finite(m) {
        return Err(Error::NonFinite("expm matrix"));
    }
    expm_unscaled(&(m * C64::from(t)))
}

/// `exp(M)` for a finite square matrix.
pub fn expm_unscaled(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(a.clone());
    }
    let ident = ComplexMatrix::identity(n, n);
    let norm = norm1(a);

    for &(deg, theta) in &THETA[..4] {
        if norm <= theta {
            let coeffs: &[f64] = match deg {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return pade_low(a, coeffs, &ident);
        }
    }

    let theta13 = THETA[4].1;
    let squarings = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * C64::from(2f64.powi(-squarings));
    let mut r = pade13(&scaled, &ident)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if !all_finite(&r) {
        return Err(Error::Overflow("matrix exponential"));
    }
    Ok(r)
}

fn pade_low(a: &ComplexMatrix, b: &[f64], ident: &ComplexMatrix) -> Result<ComplexMatrix> {
    let a2 = a * a;
    let mut u_even = ident * C64::from(b[1]);
    let mut v = ident * C64::from(b[0]);
    let mut power = ident.clone();
    for k in 1..b.len() / 2 {
        power = &power * &a2;
        u_even += &power * C64::from(b[2 * k + 1]);
        v += &power * C64::from(b[2 * k]);
    }
    let u = a * u_even;
    solve_pade(&u, &v)
}

fn pade13(a: &ComplexMatrix, ident: &ComplexMatrix) -> Result<ComplexMatrix> {
    let b = |k: usize| C64::from(B13[k]);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = a * (&a6 * inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + ident * b(1));
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + ident * b(0);
    solve_pade(&u, &v)
}

fn solve_pade(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| Error::InvalidArgument("singular Padé denominator".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::max_abs_diff;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Truncated Taylor series with scaling, used only as a test oracle.
    fn taylor_expm(a: &ComplexMatrix) -> ComplexMatrix {
        let n = a.nrows();
        let s = (norm1(a).max(1.0).log2().ceil() as i32 + 4).max(0);
        let scaled = a * C64::from(2f64.powi(-s));
        let mut sum = ComplexMatrix::identity(n, n);
        let mut term = ComplexMatrix::identity(n, n);
        for k in 1..40 {
            term = &term * &scaled / C64::from(k as f64);
            sum += &term;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let z = ComplexMatrix::zeros(4, 4);
        let e = expm(&z, 7.0).unwrap();
        assert_eq!(e, ComplexMatrix::identity(4, 4));
    }

    #[test]
    fn diagonal_case() {
        let d = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(-2.0, 0.0),
        ]));
        let e = expm(&d, 1.0).unwrap();
        assert!((e[(0, 0)] - c(1f64.exp(), 0.0)).norm() < 1e-14 * 1f64.exp());
        assert!((e[(1, 1)] - c((-2f64).exp(), 0.0)).norm() < 1e-16);
        assert_eq!(e[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn single_squeezer_closed_form() {
        // g = 0.5: S = [[0, -i], [i, 0]]
        let s = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        );
        let e = expm(&s, 1.0).unwrap();
        let (ch, sh) = (1f64.cosh(), 1f64.sinh());
        let want =
            ComplexMatrix::from_row_slice(2, 2, &[c(ch, 0.0), c(0.0, -sh), c(0.0, sh), c(ch, 0.0)]);
        assert!(max_abs_diff(&e, &want) < 1e-14);
        assert!(max_abs_diff(&e, &taylor_expm(&s)) < 1e-13);
    }

    #[test]
    fn every_pade_degree_matches_taylor() {
        let base = ComplexMatrix::from_fn(5, 5, |i, j| {
            c(
                ((i * 7 + j * 3) % 5) as f64 - 2.0,
                ((i + 2 * j) % 3) as f64 - 1.0,
            )
        });
        let nrm = norm1(&base);
        for target in [0.01, 0.2, 0.9, 2.0, 5.0, 20.0, 50.0] {
            let a = &base * C64::from(target / nrm);
            let e = expm_unscaled(&a).unwrap();
            let o = taylor_expm(&a);
            let scale = crate::kernels::max_abs(&o);
            assert!(
                max_abs_diff(&e, &o) <= 1e-12 * scale,
                "norm {target}: {}",
                max_abs_diff(&e, &o) / scale
            );
        }
    }

    #[test]
    fn rejects_non_square_and_non_finite() {
        assert!(matches!(
            expm(&ComplexMatrix::zeros(2, 3), 1.0),
            Err(Error::NotSquare { .. })
        ));
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(expm(&m, 1.0), Err(Error::NonFinite(_))));
    }
}
