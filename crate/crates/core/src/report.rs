//! Pass/fail claim reports shared by the verifiers.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub status: Status,
    /// Number of individual checks folded into this claim.
    pub checked: usize,
    /// First counterexample on failure, summary data otherwise.
    pub witness: Value,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub claims: Vec<Claim>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    fn slot(&mut self, id: &str) -> &mut Claim {
        if let Some(i) = self.claims.iter().position(|c| c.id == id) {
            return &mut self.claims[i];
        }
        self.claims.push(Claim { id: id.to_string(), status: Status::Pass, checked: 0, witness: Value::Null });
        self.claims.last_mut().unwrap()
    }

    /// Folds one check into claim `id`. Only the first failure's witness is kept.
    pub fn record(&mut self, id: &str, ok: bool, witness: impl FnOnce() -> Value) {
        let c = self.slot(id);
        c.checked += 1;
        if !ok && c.status == Status::Pass {
            c.status = Status::Fail;
            c.witness = witness();
        }
    }

    pub fn pass(&mut self, id: &str) {
        self.record(id, true, || Value::Null);
    }

    pub fn fail(&mut self, id: &str, witness: Value) {
        self.record(id, false, || witness);
    }

    /// Ensures a claim exists even when nothing was checked.
    pub fn touch(&mut self, id: &str) {
        self.slot(id);
    }

    pub fn set_witness(&mut self, id: &str, witness: Value) {
        let c = self.slot(id);
        if c.status == Status::Pass {
            c.witness = witness;
        }
    }

    pub fn claim(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn passed(&self, id: &str) -> bool {
        self.claim(id).is_some_and(|c| c.status == Status::Pass)
    }

    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> Vec<&Claim> {
        self.claims.iter().filter(|c| c.status == Status::Fail).collect()
    }

    /// Merges another report, prefixing its claim ids.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for c in other.claims {
            let id = if prefix.is_empty() { c.id.clone() } else { format!("{prefix}/{}", c.id) };
            let slot = self.slot(&id);
            slot.checked += c.checked;
            if c.status == Status::Fail && slot.status == Status::Pass {
                slot.status = Status::Fail;
                slot.witness = c.witness;
            } else if slot.witness.is_null() {
                slot.witness = c.witness;
            }
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.claims {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            s.push_str(&format!("{tag} {} ({} checks)", c.id, c.checked));
            if c.status == Status::Fail {
                s.push_str(&format!(" witness: {}", c.witness));
            }
            s.push('\n');
        }
        s
    }
}
