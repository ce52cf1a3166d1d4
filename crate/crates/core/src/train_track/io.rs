use serde::{Deserialize, Serialize};

use super::{TrainTrack, Weight};
use crate::Result;

/// JSON layout of a track: clockwise switch slot triples, branch slot
/// pairs and an optional weight per branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackFile {
    pub switches: Vec<[usize; 3]>,
    pub branches: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Weight>,
}

impl TrackFile {
    pub fn new(track: &TrainTrack, weights: Option<Weight>) -> Self {
        TrackFile { switches: track.switches.clone(), branches: track.branches.clone(), weights }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn track(&self) -> Result<TrainTrack> {
        TrainTrack::new(self.switches.clone(), self.branches.clone())
    }
}
