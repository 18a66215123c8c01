use serde::{Deserialize, Serialize};

use super::QuantumError;

/// One tensor factor of the global Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub dim: usize,
    pub owner: usize,
}

/// Ordered registers; the global space is their tensor product in this order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LayoutRepr", into = "LayoutRepr")]
pub struct RegisterLayout {
    parties: usize,
    registers: Vec<Register>,
}

#[derive(Serialize, Deserialize)]
struct LayoutRepr {
    parties: usize,
    registers: Vec<Register>,
}

impl TryFrom<LayoutRepr> for RegisterLayout {
    type Error = QuantumError;
    fn try_from(r: LayoutRepr) -> Result<Self, QuantumError> {
        RegisterLayout::new(r.parties, r.registers)
    }
}

impl From<RegisterLayout> for LayoutRepr {
    fn from(l: RegisterLayout) -> Self {
        LayoutRepr { parties: l.parties, registers: l.registers }
    }
}

impl RegisterLayout {
    pub fn new(parties: usize, registers: Vec<Register>) -> Result<Self, QuantumError> {
        if parties == 0 {
            return Err(QuantumError::Invalid("layout needs at least one party".into()));
        }
        for (i, r) in registers.iter().enumerate() {
            if r.dim == 0 {
                return Err(QuantumError::Invalid(format!("register {} has dimension 0", r.name)));
            }
            if r.owner >= parties {
                return Err(QuantumError::Invalid(format!("register {} owned by unknown party {}", r.name, r.owner)));
            }
            if registers[..i].iter().any(|q| q.name == r.name) {
                return Err(QuantumError::Invalid(format!("duplicate register name {}", r.name)));
            }
        }
        Ok(RegisterLayout { parties, registers })
    }

    /// Shorthand: `(name, dim, owner)` triples.
    pub fn from_triples(parties: usize, regs: &[(&str, usize, usize)]) -> Result<Self, QuantumError> {
        RegisterLayout::new(
            parties,
            regs.iter().map(|&(n, d, o)| Register { name: n.to_string(), dim: d, owner: o }).collect(),
        )
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn dims(&self) -> Vec<usize> {
        self.registers.iter().map(|r| r.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.registers.iter().map(|r| r.dim).product()
    }

    /// Register indices owned by `party`, in layout order.
    pub fn party_registers(&self, party: usize) -> Vec<usize> {
        (0..self.registers.len()).filter(|&i| self.registers[i].owner == party).collect()
    }

    pub fn party_dim(&self, party: usize) -> usize {
        self.party_registers(party).iter().map(|&i| self.registers[i].dim).product()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.registers.iter().position(|r| r.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_and_owners() {
        let l = RegisterLayout::from_triples(3, &[("A_b", 2, 0), ("B_a", 2, 1), ("B_c", 3, 1), ("C_b", 2, 2)]).unwrap();
        assert_eq!(l.total_dim(), 24);
        assert_eq!(l.party_registers(1), vec![1, 2]);
        assert_eq!(l.party_dim(1), 6);
        assert_eq!(l.party_dim(0), 2);
        assert_eq!(l.index_of("C_b"), Some(3));
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(RegisterLayout::from_triples(2, &[("A", 2, 2)]).is_err());
        assert!(RegisterLayout::from_triples(2, &[("A", 0, 0)]).is_err());
        assert!(RegisterLayout::from_triples(2, &[("A", 2, 0), ("A", 2, 1)]).is_err());
    }
}
