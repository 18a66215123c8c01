//! Strategies: product of source states plus local POVMs, and the Born rule.

use serde::{Deserialize, Serialize};

use super::layout::{Register, RegisterLayout};
use super::matrix::{digits_msb, index_msb, tensor, CScalar, Matrix, MATRIX_EPS};
use super::QuantumError;
use crate::behavior::{Behavior, Scenario};
use crate::scalar::{Backend, Scalar};

/// Measurement with `elements[k]` for outcome `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmRepr", into = "PovmRepr")]
pub struct Povm {
    elements: Vec<Matrix>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PovmRepr {
    dim: usize,
    elements: Vec<Matrix>,
}

impl TryFrom<PovmRepr> for Povm {
    type Error = QuantumError;
    fn try_from(r: PovmRepr) -> Result<Self, QuantumError> {
        let p = Povm::new(r.elements)?;
        if p.dim() != r.dim {
            return Err(QuantumError::Invalid(format!("POVM declares dim {} but elements are {}", r.dim, p.dim())));
        }
        Ok(p)
    }
}

impl From<Povm> for PovmRepr {
    fn from(p: Povm) -> Self {
        PovmRepr { dim: p.dim(), elements: p.elements }
    }
}

impl Povm {
    /// Shape check only; see [`Povm::check`] for positivity and completeness.
    pub fn new(elements: Vec<Matrix>) -> Result<Self, QuantumError> {
        let d = elements.first().ok_or_else(|| QuantumError::Invalid("POVM has no elements".into()))?.rows();
        if elements.iter().any(|e| e.rows() != d || e.cols() != d) {
            return Err(QuantumError::Invalid("POVM elements differ in shape".into()));
        }
        Ok(Povm { elements })
    }

    /// Projective measurement onto the computational basis of `C^d`.
    pub fn computational(d: usize, backend: Backend) -> Self {
        let elements = (0..d)
            .map(|k| {
                let mut m = Matrix::zeros(d, d, backend);
                m.set(k, k, CScalar::one(backend));
                m
            })
            .collect();
        Povm { elements }
    }

    /// The one-outcome measurement `{I}`.
    pub fn trivial(d: usize, backend: Backend) -> Self {
        Povm { elements: vec![Matrix::identity(d, backend)] }
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    /// Elements PSD and summing to the identity (exactly, or within 1e-9).
    pub fn check(&self) -> Result<(), QuantumError> {
        let d = self.dim();
        for (k, e) in self.elements.iter().enumerate() {
            if !e.is_psd() {
                return Err(QuantumError::Invalid(format!("POVM element {k} is not PSD")));
            }
        }
        let sum = self.elements.iter().skip(1).fold(self.elements[0].clone(), |acc, e| &acc + e);
        let id = Matrix::identity(d, sum.backend());
        if !sum.approx_eq(&id, tol(sum.backend())) {
            return Err(QuantumError::Incomplete(sum.max_abs_diff(&id)));
        }
        Ok(())
    }

    pub fn is_projective(&self) -> bool {
        self.elements.iter().all(Matrix::is_projector)
    }

    pub fn to_backend(&self, backend: Backend) -> Option<Povm> {
        Some(Povm { elements: self.elements.iter().map(|e| e.to_backend(backend)).collect::<Option<Vec<_>>>()? })
    }

    /// Appends zero elements up to `k` outcomes.
    pub fn padded(&self, k: usize) -> Povm {
        let mut elements = self.elements.clone();
        while elements.len() < k {
            elements.push(Matrix::zeros(self.dim(), self.dim(), self.elements[0].backend()));
        }
        Povm { elements }
    }
}

fn tol(b: Backend) -> f64 {
    match b {
        Backend::Exact => 0.0,
        Backend::Float => MATRIX_EPS,
    }
}

/// A density matrix on the listed registers (first listed most significant).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Source {
    pub registers: Vec<usize>,
    pub state: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumStrategy {
    pub layout: RegisterLayout,
    pub sources: Vec<Source>,
    /// `povms[party][setting]`, acting on the party's registers in layout order.
    pub povms: Vec<Vec<Povm>>,
}

/// One nonzero product entry `ρ[row, col]` of the global state.
struct Term {
    row: Vec<usize>,
    col: Vec<usize>,
    value: CScalar,
}

impl QuantumStrategy {
    pub fn backend(&self) -> Backend {
        let exact = self.sources.iter().all(|s| s.state.backend() == Backend::Exact)
            && self.povms.iter().flatten().flat_map(|p| p.elements()).all(|e| e.backend() == Backend::Exact);
        if exact {
            Backend::Exact
        } else {
            Backend::Float
        }
    }

    pub fn to_backend(&self, backend: Backend) -> Option<QuantumStrategy> {
        Some(QuantumStrategy {
            layout: self.layout.clone(),
            sources: self
                .sources
                .iter()
                .map(|s| Some(Source { registers: s.registers.clone(), state: s.state.to_backend(backend)? }))
                .collect::<Option<Vec<_>>>()?,
            povms: self
                .povms
                .iter()
                .map(|ps| ps.iter().map(|p| p.to_backend(backend)).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()?,
        })
    }

    pub fn scenario(&self) -> Result<Scenario, QuantumError> {
        let mut settings = Vec::new();
        let mut outcomes = Vec::new();
        for (p, ps) in self.povms.iter().enumerate() {
            let k = ps.first().ok_or_else(|| QuantumError::Invalid(format!("party {p} has no settings")))?.outcomes();
            if ps.iter().any(|m| m.outcomes() != k) {
                return Err(QuantumError::Invalid(format!("party {p} settings have different outcome counts")));
            }
            settings.push(ps.len());
            outcomes.push(k);
        }
        Ok(Scenario::new(settings, outcomes)?)
    }

    /// Structural and numerical validity.
    pub fn validate(&self) -> Result<(), QuantumError> {
        let nreg = self.layout.registers().len();
        let mut covered = vec![0usize; nreg];
        for (si, s) in self.sources.iter().enumerate() {
            let mut d = 1;
            for &r in &s.registers {
                if r >= nreg {
                    return Err(QuantumError::Invalid(format!("source {si} references register {r}")));
                }
                covered[r] += 1;
                d *= self.layout.registers()[r].dim;
            }
            if s.state.rows() != d || s.state.cols() != d {
                return Err(QuantumError::Invalid(format!("source {si} state is {}x{}, expected {d}", s.state.rows(), s.state.cols())));
            }
            if !s.state.is_psd() {
                return Err(QuantumError::Invalid(format!("source {si} state is not PSD")));
            }
            let tr = s.state.trace();
            if !tr.approx_eq(&CScalar::one(tr.backend()), tol(tr.backend())) {
                return Err(QuantumError::Invalid(format!("source {si} trace is {}", tr.re)));
            }
        }
        if let Some(r) = covered.iter().position(|&c| c != 1) {
            return Err(QuantumError::Invalid(format!(
                "register {} appears in {} sources",
                self.layout.registers()[r].name,
                covered[r]
            )));
        }
        if self.povms.len() != self.layout.parties() {
            return Err(QuantumError::Invalid("one POVM list per party required".into()));
        }
        for (p, ps) in self.povms.iter().enumerate() {
            let d = self.layout.party_dim(p);
            for (x, m) in ps.iter().enumerate() {
                if m.dim() != d {
                    return Err(QuantumError::Invalid(format!("party {p} setting {x} acts on dim {}, expected {d}", m.dim())));
                }
                m.check().map_err(|e| QuantumError::Invalid(format!("party {p} setting {x}: {e}")))?;
            }
        }
        self.scenario()?;
        Ok(())
    }

    /// Every source touches at most two parties.
    pub fn is_bipartite_product(&self) -> bool {
        self.sources.iter().all(|s| {
            let mut owners: Vec<usize> = s.registers.iter().map(|&r| self.layout.registers()[r].owner).collect();
            owners.sort_unstable();
            owners.dedup();
            owners.len() <= 2
        })
    }

    fn terms(&self) -> Vec<Term> {
        let nreg = self.layout.registers().len();
        let backend = self.backend();
        let mut terms = vec![Term { row: vec![0; nreg], col: vec![0; nreg], value: CScalar::one(backend) }];
        for s in &self.sources {
            let dims: Vec<usize> = s.registers.iter().map(|&r| self.layout.registers()[r].dim).collect();
            let d = s.state.rows();
            let mut entries = Vec::new();
            for i in 0..d {
                for j in 0..d {
                    let v = s.state.get(i, j);
                    if !v.is_zero_within(0.0) {
                        entries.push((digits_msb(i, &dims), digits_msb(j, &dims), v.clone()));
                    }
                }
            }
            let mut next = Vec::with_capacity(terms.len() * entries.len());
            for t in &terms {
                for (ri, ci, v) in &entries {
                    let mut row = t.row.clone();
                    let mut col = t.col.clone();
                    for (k, &r) in s.registers.iter().enumerate() {
                        row[r] = ri[k];
                        col[r] = ci[k];
                    }
                    next.push(Term { row, col, value: &t.value * v });
                }
            }
            terms = next;
        }
        terms
    }

    /// Index of `digits` restricted to `regs`.
    fn local_index(&self, digits: &[usize], regs: &[usize]) -> usize {
        let dims: Vec<usize> = regs.iter().map(|&r| self.layout.registers()[r].dim).collect();
        index_msb(&regs.iter().map(|&r| digits[r]).collect::<Vec<_>>(), &dims)
    }

    /// Dense global state in layout order.
    pub fn global_state(&self) -> Result<Matrix, QuantumError> {
        let mut order: Vec<usize> = Vec::new();
        for s in &self.sources {
            order.extend(&s.registers);
        }
        let states: Vec<Matrix> = self.sources.iter().map(|s| s.state.clone()).collect();
        let joint = tensor(&states)?;
        let dims: Vec<usize> = order.iter().map(|&r| self.layout.registers()[r].dim).collect();
        let perm: Vec<usize> = (0..order.len()).map(|r| order.iter().position(|&o| o == r).expect("covered")).collect();
        Ok(joint.permute_registers(&dims, &perm)?)
    }
}

/// `P(o|s) = Tr[(⊗_p E^p_{s_p,o_p}) ρ]`.
pub fn behavior_from_strategy(strategy: &QuantumStrategy) -> Result<Behavior, QuantumError> {
    strategy.validate()?;
    let scenario = strategy.scenario()?;
    let backend = strategy.backend();
    let n = strategy.layout.parties();
    let party_regs: Vec<Vec<usize>> = (0..n).map(|p| strategy.layout.party_registers(p)).collect();
    // Tr(Oρ) = Σ O[i,j] ρ[j,i]: each term's column indexes O's row.
    let terms: Vec<(Vec<(usize, usize)>, CScalar)> = strategy
        .terms()
        .into_iter()
        .map(|t| {
            let idx = party_regs
                .iter()
                .map(|regs| (strategy.local_index(&t.col, regs), strategy.local_index(&t.row, regs)))
                .collect();
            (idx, t.value)
        })
        .collect();
    let mut entries = Vec::with_capacity(scenario.len());
    for s in scenario.setting_tuples() {
        for o in scenario.outcome_tuples() {
            let mut acc = CScalar::zero(backend);
            'terms: for (idx, v) in &terms {
                let mut prod = v.clone();
                for p in 0..n {
                    let e = strategy.povms[p][s[p]].elements()[o[p]].get(idx[p].0, idx[p].1);
                    if e.is_zero_within(0.0) {
                        continue 'terms;
                    }
                    prod = &prod * e;
                }
                acc = &acc + &prod;
            }
            if !acc.im.is_zero_within(tol(backend)) {
                return Err(QuantumError::Invalid(format!("probability has imaginary part {}", acc.im)));
            }
            entries.push(acc.re);
        }
    }
    Ok(Behavior::new(scenario, entries)?)
}

/// `Tr_party[(E ⊗ I) ρ] / p` and `p`, on the remaining registers in layout order.
pub fn post_measurement_state(
    strategy: &QuantumStrategy,
    party: usize,
    element: &Matrix,
) -> Result<(Matrix, Scalar), QuantumError> {
    if party >= strategy.layout.parties() {
        return Err(QuantumError::Invalid(format!("party {party} out of range")));
    }
    let regs = strategy.layout.party_registers(party);
    let d = strategy.layout.party_dim(party);
    if element.rows() != d || element.cols() != d {
        return Err(QuantumError::Invalid(format!("element is {}x{}, party dimension {d}", element.rows(), element.cols())));
    }
    let rest: Vec<usize> = (0..strategy.layout.registers().len()).filter(|r| !regs.contains(r)).collect();
    let rd: usize = rest.iter().map(|&r| strategy.layout.registers()[r].dim).product();
    let backend = if strategy.backend() == Backend::Exact && element.backend() == Backend::Exact {
        Backend::Exact
    } else {
        Backend::Float
    };
    let mut out = vec![CScalar::zero(backend); rd * rd];
    for t in strategy.terms() {
        // ρ[(b'' r), (b r')] contributes E[b, b''] to out[r, r'].
        let e = element.get(strategy.local_index(&t.col, &regs), strategy.local_index(&t.row, &regs));
        if e.is_zero_within(0.0) {
            continue;
        }
        let i = strategy.local_index(&t.row, &rest);
        let j = strategy.local_index(&t.col, &rest);
        out[i * rd + j] = &out[i * rd + j] + &(e * &t.value);
    }
    let unnorm = Matrix::from_data(rd, rd, out)?;
    let p = unnorm.trace();
    if p.re.is_zero_within(tol(backend)) {
        return Err(QuantumError::ZeroProbability);
    }
    let inv = Scalar::one(p.re.backend()).checked_div(&p.re).ok_or(QuantumError::ZeroProbability)?;
    Ok((unnorm.scale(&inv), p.re))
}

/// Fuses each party's registers into one register and the sources into one
/// global state; measurements are unchanged.
pub fn regroup_registers(strategy: &QuantumStrategy) -> Result<QuantumStrategy, QuantumError> {
    let n = strategy.layout.parties();
    let global = strategy.global_state()?;
    let perm: Vec<usize> = (0..n).flat_map(|p| strategy.layout.party_registers(p)).collect();
    if perm.len() != strategy.layout.registers().len() {
        return Err(QuantumError::Invalid("registers with no owner".into()));
    }
    let state = global.permute_registers(&strategy.layout.dims(), &perm)?;
    let registers = (0..n)
        .map(|p| Register { name: format!("P{p}"), dim: strategy.layout.party_dim(p), owner: p })
        .collect();
    let layout = RegisterLayout::new(n, registers)?;
    Ok(QuantumStrategy {
        layout,
        sources: vec![Source { registers: (0..n).collect(), state }],
        povms: strategy.povms.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_povms_give_certain_outcome() {
        let layout = RegisterLayout::from_triples(2, &[("A", 2, 0), ("B", 3, 1)]).unwrap();
        let rho = Matrix::identity(6, Backend::Exact).scale(&Scalar::from_ratio(1, 6, Backend::Exact));
        let s = QuantumStrategy {
            layout,
            sources: vec![Source { registers: vec![0, 1], state: rho }],
            povms: vec![vec![Povm::trivial(2, Backend::Exact)], vec![Povm::trivial(3, Backend::Exact)]],
        };
        let b = behavior_from_strategy(&s).unwrap();
        assert_eq!(b.entries(), &[Scalar::one(Backend::Exact)]);
    }

    #[test]
    fn incomplete_povm_rejected() {
        let layout = RegisterLayout::from_triples(1, &[("A", 2, 0)]).unwrap();
        let half = Matrix::identity(2, Backend::Exact).scale(&Scalar::from_ratio(1, 2, Backend::Exact));
        let s = QuantumStrategy {
            layout,
            sources: vec![Source { registers: vec![0], state: half.clone() }],
            povms: vec![vec![Povm::new(vec![half]).unwrap()]],
        };
        assert!(matches!(behavior_from_strategy(&s), Err(QuantumError::Invalid(_))));
    }

    #[test]
    fn uncovered_register_rejected() {
        let layout = RegisterLayout::from_triples(1, &[("A", 2, 0), ("A2", 2, 0)]).unwrap();
        let s = QuantumStrategy {
            layout,
            sources: vec![Source { registers: vec![0], state: Matrix::identity(2, Backend::Exact).scale(&Scalar::from_ratio(1, 2, Backend::Exact)) }],
            povms: vec![vec![Povm::trivial(4, Backend::Exact)]],
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn povm_json_round_trip() {
        let p = Povm::computational(2, Backend::Exact);
        let js = serde_json::to_string(&p).unwrap();
        assert!(js.starts_with(r#"{"dim":2,"elements":"#));
        let back: Povm = serde_json::from_str(&js).unwrap();
        assert_eq!(back, p);
    }
}
