//! File formats: 4-channel FOA WAV, frame label CSV and scene scenarios.

mod labels_csv;
mod scenario;
mod wav;

pub use labels_csv::{
    format_labels_csv, parse_labels_csv, read_labels_csv, read_labels_csv_with_rate,
    write_labels_csv, LabelCsv,
};
pub use scenario::{Scenario, ScenarioSource, Waypoint};
pub use wav::{read_foa_wav, write_foa_wav, write_foa_wav_as, WavEncoding};
