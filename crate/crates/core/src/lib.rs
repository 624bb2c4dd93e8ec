//! Product codes under Chase-Pyndiah decoding: component-code construction,
//! iterative decoders with heuristic and GMI-optimized soft-information
//! post-processing, Monte-Carlo density evolution, and seeded BER simulation.

pub mod chase;
pub mod channel;
pub mod code;
pub mod de;
pub mod field;
pub mod gmi;
pub mod product;

pub use chase::{chase_list, hard_decision, soft_output, soft_output_extrinsic, ChaseError, ChaseOutcome};
pub use channel::{channel_llr, snr_to_sigma, ChannelError, ChannelParams, RngStream};
pub use code::{CodeError, CodeFamily, CodeSpec};
pub use de::{find_threshold, run_de, DeConfig, DeError, DeRun, MessagePopulation, ThetaMode, ThresholdResult};
pub use field::{BinaryPolynomial, FieldError, FieldTables};
pub use gmi::{gmi_estimate, optimize_theta, post_process, GmiError, LabeledSampleSet, PostProcParams, ThetaStar};
pub use product::{calibrate_schedule, gmi_cp_decode, original_cp_decode, CalibrationReport, CoefficientSchedule, DecodeError, DecodeResult, DecoderVariant, Direction, ProductCode, SquareMatrix};
