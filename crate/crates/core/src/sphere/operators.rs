use crate::scalar::{int, Complex, Real};
use crate::sparse::SparseMatrix;

use super::{alpha_beta, coefficient_count, lm_index, lm_of_index, lm_pairs, sign_of_m, PhaseSpaceOperator};

/// `L1, L2, L3` and the Casimir `Λ²`.
#[derive(Debug, Clone)]
pub struct AngularOperators<T: Real> {
    pub l: [PhaseSpaceOperator<T>; 3],
    pub casimir: PhaseSpaceOperator<T>,
}

/// Multiplication by the unit vector `m_i` and `K_i = i(m×L)_i`.
#[derive(Debug, Clone)]
pub struct PositionOperators<T: Real> {
    pub m: [PhaseSpaceOperator<T>; 3],
    pub k: [PhaseSpaceOperator<T>; 3],
}

/// Both operator families at one band limit.
#[derive(Debug, Clone)]
pub struct SphereOperators<T: Real> {
    pub band_limit: usize,
    pub angular: AngularOperators<T>,
    pub position: PositionOperators<T>,
}

impl<T: Real> SphereOperators<T> {
    pub fn new(band_limit: usize) -> Self {
        let angular = angular_operators(band_limit);
        let position = position_operators_with(&angular, band_limit);
        Self {
            band_limit,
            angular,
            position,
        }
    }
}

fn op<T: Real>(
    band_limit: usize,
    triplets: impl IntoIterator<Item = (usize, usize, Complex<T>)>,
) -> PhaseSpaceOperator<T> {
    let n = coefficient_count(band_limit);
    PhaseSpaceOperator::from_sparse(band_limit, SparseMatrix::from_triplets(n, n, triplets))
        .expect("square by construction")
}

fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

pub fn angular_operators<T: Real>(band_limit: usize) -> AngularOperators<T> {
    let ladder = |up: bool| {
        let step = if up { 1 } else { -1 };
        op(
            band_limit,
            lm_pairs(band_limit).filter_map(move |(l, m)| {
                let target = m + step;
                (target.unsigned_abs() as usize <= l).then(|| {
                    let li = l as i64;
                    let coef = int::<T>(li * (li + 1) - m * target).sqrt();
                    (lm_index(l, target), lm_index(l, m), re(coef))
                })
            }),
        )
    };
    let raise = ladder(true);
    let lower = ladder(false);
    let half = crate::scalar::lit::<T>(0.5);
    let l1 = raise.add(&lower).scale_real(half);
    let l2 = raise.sub(&lower).scale(Complex::new(T::zero(), -half));
    let l3 = op(
        band_limit,
        lm_pairs(band_limit).map(|(l, m)| (lm_index(l, m), lm_index(l, m), re(int::<T>(m)))),
    );
    let casimir = PhaseSpaceOperator::shell_diagonal(band_limit, |l| int::<T>((l * (l + 1)) as i64));
    AngularOperators {
        l: [l1, l2, l3],
        casimir,
    }
}

pub fn position_operators<T: Real>(band_limit: usize) -> PositionOperators<T> {
    position_operators_with(&angular_operators(band_limit), band_limit)
}

fn three_term<T: Real>(band_limit: usize, coefs: impl Fn(usize, i64) -> (T, T)) -> PhaseSpaceOperator<T> {
    let mut triplets = Vec::new();
    for (l, m) in lm_pairs(band_limit) {
        let (up, down) = coefs(l, m);
        if l < band_limit {
            triplets.push((lm_index(l + 1, m), lm_index(l, m), re(up)));
        }
        if l > 0 && (m.unsigned_abs() as usize) < l {
            triplets.push((lm_index(l - 1, m), lm_index(l, m), re(down)));
        }
    }
    op(band_limit, triplets)
}

fn position_operators_with<T: Real>(angular: &AngularOperators<T>, band_limit: usize) -> PositionOperators<T> {
    let i = Complex::new(T::zero(), T::one());
    let m3 = three_term(band_limit, |l, m| {
        let ab = alpha_beta::<T>(l, m);
        (ab.alpha1, ab.alpha2)
    });
    let k3 = three_term(band_limit, |l, m| {
        let ab = alpha_beta::<T>(l, m);
        (ab.beta1, ab.beta2)
    });
    let [l1, l2, _] = &angular.l;
    let m1 = m3.commutator(l2).scale(i);
    let m2 = m3.commutator(l1).scale(-i);
    let k1 = k3.commutator(l2).scale(i);
    let k2 = k3.commutator(l1).scale(-i);
    PositionOperators {
        m: [m1, m2, m3],
        k: [k1, k2, k3],
    }
}

/// The real signed permutation `J` with `(J c)_lm = (−1)^m c_{l,−m}`; the
/// conjugation map is `c ↦ J c̄`.
pub fn conjugation_operator<T: Real>(band_limit: usize) -> PhaseSpaceOperator<T> {
    op(
        band_limit,
        (0..coefficient_count(band_limit)).map(|k| {
            let (l, m) = lm_of_index(k);
            (k, lm_index(l, -m), re(sign_of_m::<T>(m)))
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{spectral_norm, SymbolCoefficients};
    use nalgebra::DMatrix;

    fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    }

    #[test]
    fn angular_examples() {
        let a = angular_operators::<f64>(2);
        let d: Vec<f64> = (0..9).map(|k| a.casimir.get(k, k).re).collect();
        assert_eq!(d, vec![0.0, 2.0, 2.0, 2.0, 6.0, 6.0, 6.0, 6.0, 6.0]);
        let y21 = SymbolCoefficients::<f64>::unit(2, 2, 1);
        assert_eq!(a.l[2].apply(&y21).unwrap(), y21);
        let comm = a.l[0].commutator(&a.l[1]).sub(&a.l[2].scale(Complex::new(0.0, 1.0)));
        assert!(comm.max_abs() < 1e-15);
    }

    #[test]
    fn position_examples() {
        let p = position_operators::<f64>(3);
        let y00 = SymbolCoefficients::<f64>::unit(3, 0, 0);
        let m3 = p.m[2].apply(&y00).unwrap();
        assert!((m3.get(1, 0).re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let m1 = p.m[0].apply(&y00).unwrap();
        let s6 = 1.0 / 6f64.sqrt();
        assert!((m1.get(1, -1) - Complex::new(s6, 0.0)).norm() < 1e-15);
        assert!((m1.get(1, 1) - Complex::new(-s6, 0.0)).norm() < 1e-15);
        assert!(p.k[2].apply(&y00).unwrap().max_abs() < 1e-15);
    }

    fn restrict_cols(m: &PhaseSpaceOperator<f64>, col_band: usize) -> DMatrix<Complex<f64>> {
        m.block(m.band_limit(), col_band)
    }

    #[test]
    fn vector_operator_commutators_and_unit_sphere() {
        let band = 6;
        let ops = SphereOperators::<f64>::new(band);
        let i = Complex::new(0.0, 1.0);
        for fam in [&ops.position.m, &ops.position.k] {
            for a in 0..3 {
                for b in 0..3 {
                    let mut lhs = fam[a].commutator(&ops.angular.l[b]);
                    for (c, v) in fam.iter().enumerate() {
                        let e = levi_civita(a, b, c);
                        if e != 0.0 {
                            lhs = lhs.sub(&v.scale(i * e));
                        }
                    }
                    assert!(spectral_norm(&restrict_cols(&lhs, band - 1)) < 1e-12);
                }
            }
        }
        let m = &ops.position.m;
        let sq = m[0].compose(&m[0]).add(&m[1].compose(&m[1])).add(&m[2].compose(&m[2]));
        let diff = sq.sub(&PhaseSpaceOperator::identity(band));
        assert!(spectral_norm(&restrict_cols(&diff, band - 2)) < 1e-12);
    }

    #[test]
    fn conjugation_operator_squares_to_identity() {
        let j = conjugation_operator::<f64>(4);
        assert_eq!(j.compose(&j), PhaseSpaceOperator::identity(4));
    }
}
