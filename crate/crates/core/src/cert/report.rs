use crate::linalg::CMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    NotCertified,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Certified => "Certified",
            Verdict::NotCertified => "NotCertified",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OutputValue {
    Real(f64),
    Matrix(CMatrix),
    Text(String),
}

/// Named certificate result with the inputs it was computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub name: String,
    pub verdict: Verdict,
    pub inputs: Vec<(String, f64)>,
    pub outputs: Vec<(String, OutputValue)>,
    pub notes: Vec<String>,
}

impl CertificateReport {
    pub fn new(name: impl Into<String>, verdict: Verdict) -> Self {
        Self {
            name: name.into(),
            verdict,
            inputs: Vec::new(),
            outputs: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn input(mut self, key: &str, v: f64) -> Self {
        self.inputs.push((key.into(), v));
        self
    }

    pub fn real(mut self, key: &str, v: f64) -> Self {
        self.outputs.push((key.into(), OutputValue::Real(v)));
        self
    }

    pub fn matrix(mut self, key: &str, m: CMatrix) -> Self {
        self.outputs.push((key.into(), OutputValue::Matrix(m)));
        self
    }

    pub fn text(mut self, key: &str, s: impl Into<String>) -> Self {
        self.outputs.push((key.into(), OutputValue::Text(s.into())));
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    pub fn get_real(&self, key: &str) -> Option<f64> {
        self.outputs.iter().find_map(|(k, v)| match v {
            OutputValue::Real(x) if k == key => Some(*x),
            _ => None,
        })
    }
}
