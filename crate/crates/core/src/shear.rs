//! Shear-coordinate parameterizations of the cubics.
//!
//! Each family is stored as the literal triple of classical torus elements
//! in the abstract constants `G1, G2, G3, Ginf`, together with
//!
//! * a realization of those constants in perimeter exponentials `g_i` and
//!   the central monomial `S = E1E2E3`,
//! * the constraints that select the cubic (for instance `g3 ↦ 1`),
//! * for the PI family, the central quotient `S = 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::catalog::{self, CubicPolynomial, DynkinLabel};
use crate::coeffring::{rat, sym, CoeffPoly, Rational, RingError, Symbol, SymbolTable};
use crate::qtorus::{Mode, TorusElement, TorusError};
use crate::report::{Residual, Status, VerificationReport};

const SUITE: &str = "shear";

#[derive(Clone, Debug)]
pub struct ShearParam {
    pub label: DynkinLabel,
    /// Literal coordinates, with `G` symbols as coefficients.
    pub x: [TorusElement; 3],
    /// `G ↦` flat Laurent polynomial in `g_i` and `E_i`.
    pub realization: Vec<(Symbol, CoeffPoly)>,
    /// Specializations applied after the realization.
    pub constraints: Vec<(Symbol, CoeffPoly)>,
    pub central_quotient: bool,
    /// Rewrites realized constants in the unit symbols of the catalog
    /// G-table (`E1 ↦ ·, E2, E3 ↦ 1` on central expressions).
    pub to_units: Vec<(Symbol, CoeffPoly)>,
}

fn lit(src: &str) -> TorusElement {
    TorusElement::classical(src)
}

fn table(pairs: &[(Symbol, &str)]) -> Vec<(Symbol, CoeffPoly)> {
    pairs.iter().map(|(s, v)| (*s, CoeffPoly::std(v))).collect()
}

const D4_X1: &str = "-E2*E3 - E2^-1*E3^-1 - E2^-1*E3 - G2*E3 - G3*E2^-1";
const D4_X2: &str = "-E3*E1 - E3^-1*E1^-1 - E3^-1*E1 - G3*E1 - G1*E3^-1";
const D4_X3: &str = "-E1*E2 - E1^-1*E2^-1 - E1^-1*E2 - G1*E2 - G2*E1^-1";
const PII: [&str; 3] = ["-E2*E3 - G2*E3", "-E3*E1 - G3*E1", "-E1*E2 - G1*E2"];

pub fn param(label: DynkinLabel) -> ShearParam {
    use sym::{BIG_G1 as G1, BIG_G2 as G2, BIG_G3 as G3, E1, GINF, G_1, G_2, G_3};
    use DynkinLabel::*;
    let s = "E1*E2*E3";
    let (x, realization, constraints, to_units): ([&str; 3], Vec<_>, Vec<_>, Vec<_>) = match label {
        D4 => (
            [D4_X1, D4_X2, D4_X3],
            table(&[
                (G1, "g1 + g1^-1"),
                (G2, "g2 + g2^-1"),
                (G3, "g3 + g3^-1"),
                (GINF, "E1*E2*E3 + (E1*E2*E3)^-1"),
            ]),
            vec![],
            vec![],
        ),
        D5 => (
            ["-E2*E3 - E2^-1*E3 - G2*E3 - G3*E2^-1", "-E3*E1 - G3*E1", D4_X3],
            table(&[(G1, "g1 + g1^-1"), (G2, "g2 + g2^-1"), (G3, "g3"), (GINF, s)]),
            table(&[(G_3, "1")]),
            vec![],
        ),
        E6 => (
            ["-E2*E3 - G2*E3", "-E3*E1 - G3*E1", "-E1*E2 - E1^-1*E2 - G1*E2 - G2*E1^-1"],
            table(&[(G1, "g1 + g1^-1"), (G2, "g2"), (G3, "g3"), (GINF, s)]),
            table(&[(G_2, s), (G_3, s)]),
            table(&[(E1, "Ginf")]),
        ),
        E7star => (
            PII,
            table(&[(G1, "g1"), (G2, "g2"), (G3, "g3"), (GINF, s)]),
            table(&[(G_1, "(E1*E2*E3)^-1"), (G_2, "(E1*E2*E3)^-1"), (G_3, "(E1*E2*E3)^-1")]),
            table(&[(E1, "g^-1")]),
        ),
        E7starstar => (
            PII,
            table(&[(G1, "g1"), (G2, "g2"), (G3, "g3"), (GINF, s)]),
            table(&[(G_1, "(E1*E2*E3)^-1"), (G_2, s), (G_3, "(E1*E2*E3)^-1")]),
            table(&[(E1, "h")]),
        ),
        E8 => (
            ["-E2*E3 - G2*E3", "-E3*E1", "-E1*E2 - G1*E2"],
            table(&[(G1, "g1"), (G2, "g2"), (G3, "0"), (GINF, s)]),
            table(&[(G_1, "1"), (G_2, "1")]),
            vec![],
        ),
        D6 => (
            [
                "-E2*E3 - E2^-1*E3 - G2*E3",
                "-E3*E1",
                "-E1*E2 - E1^-1*E2 - E1^-1*E2^-1 - G1*E2 - G2*E1^-1",
            ],
            table(&[(G1, "g1 + g1^-1"), (G2, "g2 + g2^-1"), (G3, "0"), (GINF, s)]),
            table(&[(G_1, s)]),
            table(&[(E1, "a*b"), (G_2, "a*b^-1")]),
        ),
        D7 => (
            [
                "-E2^-1*E3 - G2*E3 - G3*E2^-1",
                "-E3*E1 - G3*E1",
                "-E1*E2 - E1^-1*E2^-1 - G2*E1^-1",
            ],
            // The G-table values G1 = G3 = 1, Ginf = 0; G2 = g2 is tied to the
            // central monomial so that the cubic holds up to its constant.
            table(&[(G1, "1"), (G2, "g2"), (G3, "g3"), (GINF, "0")]),
            table(&[(G_2, "(E1*E2*E3)^-1"), (G_3, "1")]),
            vec![],
        ),
        D8 => (
            ["-E2^-1*E3 - G2*E3", "-E3*E1", "-E1*E2 - E1^-1*E2^-1 - G2*E1^-1"],
            table(&[(G1, "0"), (G2, "g2"), (G3, "0"), (GINF, s)]),
            table(&[(G_2, "0")]),
            vec![],
        ),
    };
    ShearParam {
        label,
        x: x.map(lit),
        realization,
        constraints,
        central_quotient: label == E8,
        to_units,
    }
}

/// The D7 realization read off the shear section alone: `G_i = g_i`,
/// `Ginf = S` and `g1 = S⁻¹`.
pub fn d7_printed_param() -> ShearParam {
    let mut p = param(DynkinLabel::D7);
    p.realization = table(&[
        (sym::BIG_G1, "g1"),
        (sym::BIG_G2, "g2"),
        (sym::BIG_G3, "g3"),
        (sym::GINF, "E1*E2*E3"),
    ]);
    p.constraints = table(&[(sym::G_1, "(E1*E2*E3)^-1")]);
    p
}

impl ShearParam {
    /// Realization followed by the constraints, on a flat polynomial.
    pub fn realize_flat(&self, p: &CoeffPoly) -> Result<CoeffPoly, RingError> {
        let r = p.specialize(&self.realization)?;
        if self.constraints.is_empty() {
            Ok(r)
        } else {
            r.specialize(&self.constraints)
        }
    }

    /// Realization only, constraints not applied.
    pub fn realize_free(&self, p: &CoeffPoly) -> Result<CoeffPoly, RingError> {
        p.specialize(&self.realization)
    }

    pub fn free_x(&self) -> Result<[TorusElement; 3], TorusError> {
        let f = |t: &TorusElement| TorusElement::from_flat(Mode::Classical, &self.realize_free(&t.to_flat())?);
        Ok([f(&self.x[0])?, f(&self.x[1])?, f(&self.x[2])?])
    }

    /// Realized coordinates in the full torus; the central quotient is
    /// left to [`ShearParam::reduce`].
    pub fn realized_x(&self) -> Result<[TorusElement; 3], TorusError> {
        let f = |t: &TorusElement| TorusElement::from_flat(Mode::Classical, &self.realize_flat(&t.to_flat())?);
        Ok([f(&self.x[0])?, f(&self.x[1])?, f(&self.x[2])?])
    }

    pub fn reduce(&self, t: &TorusElement) -> TorusElement {
        if self.central_quotient {
            t.reduce_central()
        } else {
            t.clone()
        }
    }

    pub fn reduce_flat(&self, p: &CoeffPoly) -> Result<CoeffPoly, TorusError> {
        if self.central_quotient {
            Ok(TorusElement::from_flat(Mode::Classical, p)?.reduce_central().to_flat())
        } else {
            Ok(p.clone())
        }
    }

    /// ω's of the catalog with the constants realized (flat, central).
    pub fn realized_omega(&self) -> Result<[CoeffPoly; 4], RingError> {
        let spec = catalog::build(self.label);
        let [a, b, c, d] = &spec.omega;
        Ok([self.realize_flat(a)?, self.realize_flat(b)?, self.realize_flat(c)?, self.realize_flat(d)?])
    }

    pub fn realized_cubic(&self) -> Result<CubicPolynomial, RingError> {
        let spec = catalog::build(self.label);
        Ok(CubicPolynomial::from_coefficients(spec.eps, &self.realized_omega()?))
    }

    /// The cubic evaluated on the realized coordinates, after the quotient.
    pub fn cubic_residual(&self) -> Result<CoeffPoly, TorusError> {
        let x = self.realized_x()?;
        let point = [x[0].to_flat(), x[1].to_flat(), x[2].to_flat()];
        let value = catalog::evaluate(&self.realized_cubic()?, &point)?;
        self.reduce_flat(&value)
    }
}

fn torus(p: &CoeffPoly) -> TorusElement {
    TorusElement::from_flat(Mode::Classical, p).expect("classical polynomial")
}

pub fn verify_cubic(label: DynkinLabel) -> Result<VerificationReport, TorusError> {
    let p = param(label);
    let residual = p.cubic_residual()?;
    let mut report = VerificationReport::from_residual(SUITE, label.name(), "cubic", Residual::from(&torus(&residual)));
    if !residual.is_zero() {
        let omega = p.realized_omega()?;
        let expected = p.reduce_flat(&omega[3])?;
        match catalog::constant_from_residual(&(&residual - &expected)) {
            Ok(k) => {
                let k = p.reduce_flat(&k)?;
                report.calibrate("calibrated_constant", k.to_string());
                report.insert("omega4", expected.to_string());
                report.insert("calibrated_matches_omega4", k == expected);
                if k != expected {
                    report.status = Status::Fail;
                }
            }
            Err(e) => report.insert("calibration_error", e.to_string()),
        }
    }
    let intro = catalog::reconcile_intro(label);
    report.insert("intro_reconciliation", intro.to_json());
    if let Some(w) = witness(label) {
        report.insert("witness", w);
    }
    if label == DynkinLabel::D7 {
        let printed = d7_printed_param();
        let r = printed.cubic_residual()?;
        let central = catalog::constant_from_residual(&r).is_ok();
        report.insert(
            "printed_realization",
            json!({ "residual": crate::report::digest(&r.to_string(), 200), "central": central }),
        );
    }
    Ok(report)
}

/// Value of the realized coordinates at `E_i = 1`, `g_i = 1`.
fn witness(label: DynkinLabel) -> Option<serde_json::Value> {
    if !matches!(label, DynkinLabel::D4 | DynkinLabel::D5) {
        return None;
    }
    let p = param(label);
    let x = p.realized_x().ok()?;
    let ones: Vec<(Symbol, CoeffPoly)> = sym::E
        .iter()
        .chain(sym::SMALL_G.iter())
        .map(|s| (*s, CoeffPoly::one(&SymbolTable::standard())))
        .collect();
    let pt: Vec<String> = x.iter().map(|t| t.to_flat().specialize(&ones).unwrap().to_string()).collect();
    let w: Vec<String> =
        p.realized_omega().ok()?.iter().map(|t| t.specialize(&ones).unwrap().to_string()).collect();
    Some(json!({ "point": pt, "omega": w }))
}

fn cyclic_pairs() -> [(usize, usize, usize); 3] {
    [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
}

/// `{x_i, x_{i+1}} − (x_i x_{i+1} + 2ε_k x_k + ω_k)` for the three cyclic
/// pairs, with `k` the third index.
pub fn poisson_residuals(label: DynkinLabel, index_by_i: bool) -> Result<Vec<TorusElement>, TorusError> {
    let p = param(label);
    let x = p.realized_x()?;
    let omega = p.realized_omega()?;
    let eps = catalog::epsilon(label);
    let mut out = Vec::new();
    for (i, j, k) in cyclic_pairs() {
        let idx = if index_by_i { i } else { k };
        let lhs = x[i].poisson(&x[j])?;
        let two_eps = CoeffPoly::int(&SymbolTable::standard(), 2 * eps[idx]);
        let rhs = &(&x[i] * &x[j]) + &x[k].scale(&two_eps);
        let rhs = &rhs + &torus(&omega[idx]);
        out.push(p.reduce(&(&lhs - &rhs)));
    }
    Ok(out)
}

pub fn verify_poisson(label: DynkinLabel) -> Result<VerificationReport, TorusError> {
    let names = ["(1,2)", "(2,3)", "(3,1)"];
    let k = poisson_residuals(label, false)?;
    let parts: Vec<(String, Residual)> =
        names.iter().zip(k.iter()).map(|(n, r)| (n.to_string(), Residual::from(r))).collect();
    let mut report = VerificationReport::from_residual(SUITE, label.name(), "poisson", Residual::from(parts));
    let i = poisson_residuals(label, true)?;
    let i_holds = i.iter().all(|r| r.is_zero());
    report.insert("convention", "k (third index)");
    report.insert("i_convention_holds", i_holds);
    if !i_holds && report.passed() {
        report.insert("i_convention", "fails; the i-indexed display is a typo for the k-indexed one");
    }
    Ok(report)
}

/// Bracket on polynomials in `x1, x2, x3` with `{x_i, x_{i+1}} = ∂S/∂x_k`.
pub fn nambu_bracket(s: &CoeffPoly, f: &CoeffPoly, g: &CoeffPoly) -> CoeffPoly {
    let mut out = CoeffPoly::zero(s.table());
    for (i, j, k) in cyclic_pairs() {
        let b = s.derivative(sym::X[k]);
        let t = &f.derivative(sym::X[i]) * &g.derivative(sym::X[j]) - &f.derivative(sym::X[j]) * &g.derivative(sym::X[i]);
        out += &(&t * &b);
    }
    out
}

pub fn verify_jacobi_casimir(label: DynkinLabel) -> Result<VerificationReport, TorusError> {
    let p = param(label);
    let x = p.realized_x()?;
    let mut parts = Vec::new();

    let mut jac = TorusElement::zero(Mode::Classical, &SymbolTable::standard());
    for (i, j, k) in cyclic_pairs() {
        jac = &jac + &x[i].poisson(&x[j].poisson(&x[k])?)?;
    }
    parts.push(("torus_jacobi".to_string(), Residual::from(&p.reduce(&jac))));

    let value = torus(&p.cubic_residual()?);
    for (i, xi) in x.iter().enumerate() {
        let b = p.reduce(&xi.poisson(&value)?);
        parts.push((format!("torus_casimir_x{}", i + 1), Residual::from(&b)));
    }

    let cubic = catalog::cubic(&catalog::build(label)).into_poly();
    let xs = sym::X.map(|s| CoeffPoly::var(cubic.table(), s));
    let mut nj = CoeffPoly::zero(cubic.table());
    for (i, j, k) in cyclic_pairs() {
        nj += &nambu_bracket(&cubic, &xs[i], &nambu_bracket(&cubic, &xs[j], &xs[k]));
    }
    parts.push(("abstract_jacobi".to_string(), Residual::from(&nj)));
    for (i, xi) in xs.iter().enumerate() {
        parts.push((format!("abstract_casimir_x{}", i + 1), Residual::from(&nambu_bracket(&cubic, xi, &cubic))));
    }
    Ok(VerificationReport::from_residual(SUITE, label.name(), "jacobi_casimir", Residual::from(parts)))
}

/// The uniformization `x = (−u−u⁻¹, −v−v⁻¹, −uv−(uv)⁻¹)` of the D4 cubic
/// with `ω = (0, 0, 0, −4)`.
pub fn verify_cayley() -> VerificationReport {
    let p = CoeffPoly::std;
    let c = CubicPolynomial::from_coefficients([1, 1, 1], &[p("0"), p("0"), p("0"), p("-4")]);
    let point = [p("-u - u^-1"), p("-v - v^-1"), p("-u*v - u^-1*v^-1")];
    let value = catalog::evaluate(&c, &point).expect("polynomial evaluation");
    let inv = [(sym::U, p("u^-1")), (sym::V, p("v^-1"))];
    let mut parts = vec![("cubic".to_string(), Residual::from(&value))];
    for (i, x) in point.iter().enumerate() {
        let d = &x.specialize(&inv).unwrap() - x;
        parts.push((format!("involution_x{}", i + 1), Residual::from(&d)));
    }
    let at_one = point.clone().map(|x| x.specialize(&[(sym::U, p("1")), (sym::V, p("1"))]).unwrap());
    VerificationReport::from_residual(SUITE, "D4", "cayley", Residual::from(parts))
        .with("point_at_u_v_1", at_one.iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

/// Compares the realized constants with the catalog G-table.
pub fn gtable_consistency(label: DynkinLabel) -> Result<VerificationReport, TorusError> {
    let p = param(label);
    let spec = catalog::build(label);
    let mut parts = Vec::new();
    let rest = [(sym::E2, CoeffPoly::one(&SymbolTable::standard())), (sym::E3, CoeffPoly::one(&SymbolTable::standard()))];
    for (g, expected) in &spec.gtable {
        let realized = p.reduce_flat(&p.realize_flat(&CoeffPoly::var(&SymbolTable::standard(), *g))?)?;
        let mut units = realized.specialize(&p.to_units)?;
        if !p.to_units.is_empty() {
            units = units.specialize(&rest)?;
        }
        let name = SymbolTable::standard().name(*g).to_string();
        parts.push((name, Residual::from(&(&units - expected))));
    }
    let residual = Residual::from(parts);
    Ok(if residual.is_zero() {
        VerificationReport::from_residual(SUITE, label.name(), "gtable", residual)
    } else {
        VerificationReport::reported(SUITE, label.name(), "gtable", residual)
            .with("note", "shear realization differs from the catalog G-table")
    })
}

fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let n: i64 = rng.gen_range(-9..=9);
        let d: i64 = rng.gen_range(1..=5);
        if n != 0 {
            return rat(n, d);
        }
    }
}

/// Evaluates the symbolic cubic residual at random nonzero rational values
/// of the torus variables and perimeter exponentials, and compares with
/// the cubic evaluated on the numerically evaluated coordinates.
pub fn random_crosscheck(label: DynkinLabel, seed: u64, samples: usize) -> Result<VerificationReport, TorusError> {
    let p = param(label);
    let t = SymbolTable::standard();
    let x = p.realized_x()?;
    let omega = p.realized_omega()?;
    let residual = p.cubic_residual()?;
    let cubic_form = CubicPolynomial::from_coefficients(
        catalog::epsilon(label),
        &sym::W.map(|s| CoeffPoly::var(&t, s)),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (label as u64).wrapping_mul(0x9e37_79b9));
    let mut mismatches = 0usize;
    let mut nonzero = 0usize;
    for _ in 0..samples {
        let mut assign: Vec<(Symbol, CoeffPoly)> = Vec::new();
        for s in sym::E.iter().chain(sym::SMALL_G.iter()) {
            assign.push((*s, CoeffPoly::constant(&t, random_rational(&mut rng))));
        }
        if p.central_quotient {
            // stay on the quotient S = 1
            let e1 = assign[0].1.clone();
            let e2 = assign[1].1.clone();
            assign[2].1 = (&e1 * &e2).inverse()?;
        }
        let direct = residual.specialize(&assign)?;
        let xv: Vec<CoeffPoly> = x.iter().map(|xi| xi.to_flat().specialize(&assign)).collect::<Result<_, _>>()?;
        let mut wassign: Vec<(Symbol, CoeffPoly)> =
            sym::X.iter().copied().zip(xv).collect();
        for (s, w) in sym::W.iter().zip(omega.iter()) {
            wassign.push((*s, w.specialize(&assign)?));
        }
        let numeric = cubic_form.poly().specialize(&wassign)?;
        if numeric != direct {
            mismatches += 1;
        }
        if !direct.is_zero() {
            nonzero += 1;
        }
    }
    let consistent = mismatches == 0 && (!residual.is_zero() || nonzero == 0);
    let r = if consistent { Residual::zero() } else { Residual::from(&CoeffPoly::int(&t, mismatches as i64)) };
    Ok(VerificationReport::from_residual(SUITE, label.name(), "random_crosscheck", r)
        .with("samples", samples)
        .with("seed", seed)
        .with("symbolic_residual_zero", residual.is_zero())
        .with("nonzero_evaluations", nonzero))
}

pub fn suite(labels: &[DynkinLabel], seed: u64) -> Result<Vec<VerificationReport>, TorusError> {
    let mut out = Vec::new();
    for &l in labels {
        out.push(verify_cubic(l)?);
        out.push(verify_poisson(l)?);
        out.push(verify_jacobi_casimir(l)?);
        out.push(gtable_consistency(l)?);
        out.push(random_crosscheck(l, seed, 20)?);
    }
    if labels.contains(&DynkinLabel::D4) {
        out.push(verify_cayley());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_coordinates() {
        let d5 = param(DynkinLabel::D5);
        assert_eq!(d5.x[1].to_flat(), CoeffPoly::std("-E3*E1 - G3*E1"));
        assert_eq!(param(DynkinLabel::D8).x[1].to_flat(), CoeffPoly::std("-E1*E3"));
        let d4 = param(DynkinLabel::D4);
        assert_eq!(d4.x[2].len(), 5);
        assert!(!d4.x[2].coefficient([-1, 0, 0]).is_zero());
    }

    #[test]
    fn witnesses_at_the_origin() {
        let w = witness(DynkinLabel::D4).unwrap();
        assert_eq!(w["point"], json!(["-7", "-7", "-7"]));
        assert_eq!(w["omega"], json!(["-8", "-8", "-8", "28"]));
        let w = witness(DynkinLabel::D5).unwrap();
        assert_eq!(w["point"], json!(["-5", "-2", "-7"]));
        assert_eq!(w["omega"], json!(["-4", "-4", "-1", "6"]));
    }

    #[test]
    fn cubics_hold_where_expected() {
        for l in [DynkinLabel::D4, DynkinLabel::D5, DynkinLabel::E6, DynkinLabel::E7star, DynkinLabel::E8] {
            assert!(verify_cubic(l).unwrap().passed(), "{l}");
        }
    }

    #[test]
    fn d8_needs_a_different_constant() {
        let r = verify_cubic(DynkinLabel::D8).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.payload["calibrated_constant"], json!("0"));
    }

    #[test]
    fn poisson_on_d5() {
        let r = verify_poisson(DynkinLabel::D5).unwrap();
        assert!(r.passed(), "{}", r.residual.text);
    }

    #[test]
    fn self_bracket_vanishes() {
        let x = param(DynkinLabel::D4).realized_x().unwrap();
        for xi in &x {
            assert!(xi.poisson(xi).unwrap().is_zero());
        }
    }

    #[test]
    fn cayley() {
        let r = verify_cayley();
        assert!(r.passed());
        assert_eq!(r.payload["point_at_u_v_1"], json!(["-2", "-2", "-2"]));
    }

    #[test]
    fn jacobi_on_d4() {
        assert!(verify_jacobi_casimir(DynkinLabel::D4).unwrap().passed());
    }

    #[test]
    fn crosscheck_is_seeded() {
        let a = random_crosscheck(DynkinLabel::E6, 7, 5).unwrap();
        assert!(a.passed());
    }
}
