//! Event-file and frame-container formats.
//!
//! * `.bin` - 5-byte ATIS records as shipped with N-MNIST and N-Caltech 101.
//! * `.evt.txt` - one `t x y p` line per event under a `# width height duration` header.
//! * `.ndaf` - little-endian frame tensor container.

mod bin;
mod ndaf;
mod text;

pub use bin::{parse_bin, write_bin, ParseReport, RECORD_LEN, MAX_TIMESTAMP};
pub use ndaf::{read_frames, write_frames, write_frames_as, Dtype, HEADER_LEN, MAGIC, VERSION};
pub use text::{parse_text_events, write_text_events};
