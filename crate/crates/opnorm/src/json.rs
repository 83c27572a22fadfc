//! JSON forms of spaces, tensors, maps and certificates.
//!
//! Complex numbers are `[re, im]` pairs; plain numbers are accepted as real
//! entries on input. Matrices are lists of rows. A space is either the name of
//! a standard space (`"row:3"`, `"rowcap:2"`, `"full:2x2"`, `"scalar"`) or
//! `{"label", "ambient": [p, q], "basis": [[entries, row-major], ...]}`.
//!
//! Coefficient conventions:
//! - tensor: `coeffs[i][j]` multiplies `e_i ⊗ f_j`;
//! - map: `coeffs[j][i]` is the coefficient of `f_j` in `u(e_i)`;
//! - three-fold tensor: `coeffs[i][j][l]` multiplies `e_i ⊗ f_j ⊗ g_l`.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use opnorm_core::estimate::Certificate;
use opnorm_core::factor::Factorization;
use opnorm_core::haagerup::{Decomposition, Decomposition3};
use opnorm_core::space::SpaceRef;
use opnorm_core::{ComplexMatrix, ConcreteOperatorSpace, SpaceMap, StandardKind, Tensor3, TensorElement, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

impl Entry {
    pub fn value(self) -> C64 {
        match self {
            Entry::Complex([re, im]) => C64::new(re, im),
            Entry::Real(re) => C64::new(re, 0.0),
        }
    }
}

impl From<C64> for Entry {
    fn from(z: C64) -> Self {
        Entry::Complex([z.re, z.im])
    }
}

pub type MatrixJson = Vec<Vec<Entry>>;

pub fn matrix(rows: &[Vec<Entry>]) -> Result<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Invalid(format!("matrix rows must be nonempty and of equal length ({r} rows)")));
    }
    let data = rows.iter().flatten().map(|e| e.value()).collect();
    Ok(ComplexMatrix::new(r, c, data)?)
}

pub fn matrix_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].into()).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceJson {
    pub label: String,
    pub ambient: [usize; 2],
    pub basis: Vec<Vec<Entry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceSpec {
    Named(String),
    Explicit(SpaceJson),
}

impl SpaceSpec {
    pub fn resolve(&self) -> Result<SpaceRef> {
        match self {
            SpaceSpec::Named(name) => Ok(Arc::new(ConcreteOperatorSpace::standard(name.parse::<StandardKind>()?))),
            SpaceSpec::Explicit(s) => {
                let [p, q] = s.ambient;
                let basis = s
                    .basis
                    .iter()
                    .enumerate()
                    .map(|(i, b)| {
                        if b.len() != p * q {
                            return Err(Error::Invalid(format!("basis element {i} has {} entries, ambient is {p}x{q}", b.len())));
                        }
                        Ok(ComplexMatrix::new(p, q, b.iter().map(|e| e.value()).collect())?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Arc::new(ConcreteOperatorSpace::new(basis, s.label.clone())?))
            }
        }
    }

    /// The standard name when the space is the standard one of its label.
    pub fn of(space: &ConcreteOperatorSpace) -> Self {
        if let Ok(kind) = space.label().parse::<StandardKind>() {
            if ConcreteOperatorSpace::standard(kind) == *space {
                return SpaceSpec::Named(space.label().to_string());
            }
        }
        let (p, q) = space.ambient();
        SpaceSpec::Explicit(SpaceJson {
            label: space.label().to_string(),
            ambient: [p, q],
            basis: space.basis().iter().map(|b| b.data().iter().map(|&z| z.into()).collect()).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub left: SpaceSpec,
    pub right: SpaceSpec,
    pub coeffs: MatrixJson,
}

impl TensorJson {
    pub fn to_tensor(&self) -> Result<TensorElement> {
        Ok(TensorElement::new(self.left.resolve()?, self.right.resolve()?, matrix(&self.coeffs)?)?)
    }

    pub fn of(t: &TensorElement) -> Self {
        TensorJson { left: SpaceSpec::of(t.left()), right: SpaceSpec::of(t.right()), coeffs: matrix_json(t.coeffs()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    pub domain: SpaceSpec,
    pub codomain: SpaceSpec,
    pub coeffs: MatrixJson,
}

impl MapJson {
    pub fn to_map(&self) -> Result<SpaceMap> {
        Ok(SpaceMap::new(self.domain.resolve()?, self.codomain.resolve()?, matrix(&self.coeffs)?)?)
    }

    pub fn of(u: &SpaceMap) -> Self {
        MapJson { domain: SpaceSpec::of(u.domain()), codomain: SpaceSpec::of(u.codomain()), coeffs: matrix_json(u.coeffs()) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor3Json {
    pub spaces: [SpaceSpec; 3],
    pub coeffs: Vec<Vec<Vec<Entry>>>,
}

impl Tensor3Json {
    pub fn to_tensor(&self) -> Result<Tensor3> {
        let spaces = [self.spaces[0].resolve()?, self.spaces[1].resolve()?, self.spaces[2].resolve()?];
        let dims = [spaces[0].dim(), spaces[1].dim(), spaces[2].dim()];
        let shape_ok = self.coeffs.len() == dims[0]
            && self.coeffs.iter().all(|m| m.len() == dims[1] && m.iter().all(|row| row.len() == dims[2]));
        if !shape_ok {
            return Err(Error::Invalid(format!("coefficients must be nested {}x{}x{}", dims[0], dims[1], dims[2])));
        }
        let coeffs = self.coeffs.iter().flatten().flatten().map(|e| e.value()).collect();
        Ok(Tensor3::new(spaces, coeffs)?)
    }

    pub fn of(t: &Tensor3) -> Self {
        let [m1, m2, m3] = t.dims();
        let sp = t.spaces();
        Tensor3Json {
            spaces: [SpaceSpec::of(&sp[0]), SpaceSpec::of(&sp[1]), SpaceSpec::of(&sp[2])],
            coeffs: (0..m1).map(|i| (0..m2).map(|j| (0..m3).map(|l| t.coeff(i, j, l).into()).collect()).collect()).collect(),
        }
    }
}

/// Input of `thm2 build`: maps `α₁: E₁ → M_{h₁×h₂}`, `β₁: E₁ → M_{h₂×h₃}`,
/// `α₂: E₂ → M_{h₂×h₃}`, `β₂: E₂ → M_{h₁×h₂}` given as maps into spaces of
/// the right ambient shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrupleJson {
    pub alpha1: MapJson,
    pub alpha2: MapJson,
    pub beta1: MapJson,
    pub beta2: MapJson,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
    fs::write(path, text + "\n").map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn decomposition(d: &Decomposition) -> Value {
    json!({
        "left": SpaceSpec::of(&d.left),
        "right": SpaceSpec::of(&d.right),
        "a": matrix_json(&d.a),
        "b": matrix_json(&d.b),
        "value": d.value(),
    })
}

fn decomposition3(d: &Decomposition3) -> Value {
    json!({
        "spaces": d.spaces.iter().map(|s| SpaceSpec::of(s)).collect::<Vec<_>>(),
        "a": matrix_json(&d.a),
        "core": matrix_json(&d.core),
        "c": matrix_json(&d.c),
        "value": d.value(),
    })
}

fn factorization(f: &Factorization) -> Value {
    json!({
        "through": f.through.to_string(),
        "first_leg": MapJson::of(&f.first_leg),
        "second_leg": MapJson::of(&f.second_leg),
        "residual": f.residual,
        "first_cb": f.first_cb,
        "second_cb": f.second_cb,
    })
}

/// A certificate as JSON, tagged by `"kind"`.
pub fn certificate_json(cert: &Certificate) -> Value {
    match cert {
        Certificate::None => json!({ "kind": "none" }),
        Certificate::LevelInput { k, blocks } => json!({
            "kind": "level-input",
            "k": k,
            "blocks": blocks.iter().map(matrix_json).collect::<Vec<_>>(),
        }),
        Certificate::Decomposition(d) => {
            let mut v = decomposition(d);
            v["kind"] = json!("decomposition");
            v
        }
        Certificate::Decomposition3(d) => {
            let mut v = decomposition3(d);
            v["kind"] = json!("decomposition3");
            v
        }
        Certificate::Split(s) => json!({
            "kind": "split",
            "v": TensorJson::of(&s.v),
            "w": TensorJson::of(&s.w),
            "v_decomposition": decomposition(&s.v_decomposition),
            "wt_decomposition": decomposition(&s.wt_decomposition),
        }),
        Certificate::Pair(p) => json!({
            "kind": "commuting-pair",
            "provenance": p.provenance.as_str(),
            "k": p.k,
            "sigma1": MapJson::of(&p.sigma1),
            "sigma2": MapJson::of(&p.sigma2),
            "v": p.v_contraction.as_ref().map(matrix_json),
            "w": p.w_contraction.as_ref().map(matrix_json),
            "cb1": { "value": p.cb1.value, "bound_kind": p.cb1.bound_kind.as_str() },
            "cb2": { "value": p.cb2.value, "bound_kind": p.cb2.bound_kind.as_str() },
        }),
        Certificate::Factorization(f) => {
            let mut v = factorization(f);
            v["kind"] = json!("factorization");
            v
        }
        Certificate::SplitFactorization { row, column } => json!({
            "kind": "split-factorization",
            "row": row.as_deref().map(factorization),
            "column": column.as_deref().map(factorization),
        }),
        Certificate::HilbertFactorization { a, b } => json!({
            "kind": "hilbert-factorization",
            "a": matrix_json(a),
            "b": matrix_json(b),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_and_explicit_spaces() {
        let named: SpaceSpec = serde_json::from_str("\"rowcap:2\"").unwrap();
        let e = named.resolve().unwrap();
        assert_eq!((e.dim(), e.ambient()), (2, (4, 4)));
        assert_eq!(SpaceSpec::of(&e), named);

        let explicit: SpaceSpec = serde_json::from_str(
            r#"{"label":"diag","ambient":[2,2],"basis":[[[1,0],[0,0],[0,0],[0,0]],[0,0,0,[0,1]]]}"#,
        )
        .unwrap();
        let d = explicit.resolve().unwrap();
        assert_eq!(d.basis()[1][(1, 1)], C64::new(0.0, 1.0));
        assert_eq!(SpaceSpec::of(&d).resolve().unwrap(), d);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let short: SpaceSpec = serde_json::from_str(r#"{"label":"x","ambient":[2,2],"basis":[[1,0,0]]}"#).unwrap();
        assert!(matches!(short.resolve(), Err(Error::Invalid(_))));
        let dependent: SpaceSpec = serde_json::from_str(r#"{"label":"x","ambient":[1,2],"basis":[[1,0],[2,0]]}"#).unwrap();
        assert!(matches!(dependent.resolve(), Err(Error::Core(opnorm_core::Error::DependentBasis { .. }))));
        assert!(matrix(&[vec![Entry::Real(1.0)], vec![]]).is_err());
        let t: TensorJson = serde_json::from_str(r#"{"left":"row:2","right":"column:3","coeffs":[[1,0],[0,1]]}"#).unwrap();
        assert!(matches!(t.to_tensor(), Err(Error::Core(opnorm_core::Error::ShapeMismatch(_)))));
        let bad_name: SpaceSpec = serde_json::from_str("\"diag:2\"").unwrap();
        assert!(bad_name.resolve().is_err());
    }

    #[test]
    fn tensors_maps_and_three_fold_round_trip() {
        let t: TensorJson = serde_json::from_str(r#"{"left":"column:2","right":"row:2","coeffs":[[1,0],[0,[0.5,-1]]]}"#).unwrap();
        let tensor = t.to_tensor().unwrap();
        assert_eq!(TensorJson::of(&tensor).to_tensor().unwrap(), tensor);

        let u: MapJson = serde_json::from_str(r#"{"domain":"row:2","codomain":"column:3","coeffs":[[1,0],[0,1],[1,1]]}"#).unwrap();
        let map = u.to_map().unwrap();
        assert_eq!(map.images()[1], ComplexMatrix::from_real(3, 1, &[0.0, 1.0, 1.0]).unwrap());
        assert_eq!(MapJson::of(&map).to_map().unwrap(), map);

        let t3: Tensor3Json =
            serde_json::from_str(r#"{"spaces":["column:2","scalar","row:2"],"coeffs":[[[1,0]],[[0,1]]]}"#).unwrap();
        let tensor3 = t3.to_tensor().unwrap();
        assert_eq!(tensor3.coeff(1, 0, 1), C64::new(1.0, 0.0));
        assert_eq!(Tensor3Json::of(&tensor3).to_tensor().unwrap(), tensor3);
        let ragged: Tensor3Json = serde_json::from_str(r#"{"spaces":["column:2","scalar","row:2"],"coeffs":[[[1,0]],[[0]]]}"#).unwrap();
        assert!(ragged.to_tensor().is_err());
    }

    #[test]
    fn certificates_are_tagged() {
        let e = Arc::new(ConcreteOperatorSpace::standard(StandardKind::Row(2)));
        let d = Decomposition::new(e.clone(), e, ComplexMatrix::identity(2), ComplexMatrix::identity(2)).unwrap();
        let v = certificate_json(&Certificate::Decomposition(d));
        assert_eq!(v["kind"], "decomposition");
        assert_eq!(v["left"], "row:2");
        assert_eq!(certificate_json(&Certificate::None)["kind"], "none");
    }
}
