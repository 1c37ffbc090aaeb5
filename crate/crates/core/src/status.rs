use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Return status of a node, and value of a condition literal.
///
/// `Running` doubles as "unknown" for conditions whose value is unobserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "S")]
    Success,
    #[serde(rename = "F")]
    Failure,
    #[serde(rename = "R")]
    Running,
}

impl Status {
    pub const ALL: [Status; 3] = [Status::Success, Status::Failure, Status::Running];

    pub fn symbol(self) -> char {
        match self {
            Status::Success => 'S',
            Status::Failure => 'F',
            Status::Running => 'R',
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for Status {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S" => Ok(Status::Success),
            "F" => Ok(Status::Failure),
            "R" => Ok(Status::Running),
            _ => Err(()),
        }
    }
}
