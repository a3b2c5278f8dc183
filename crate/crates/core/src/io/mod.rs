//! File formats: WAV audio, dense tensors, code matrices and table
//! predictors.

mod codes;
mod table;
mod tensor;
mod wav;

pub use codes::{read_codes, write_codes, CodeFile, MAGIC as CODES_MAGIC, VERSION as CODES_VERSION};
pub use table::{read_table_predictor, table_predictor_bytes, table_predictor_from_bytes, TABLE_FORMAT};
pub use tensor::{read_tensor, write_tensor, Dtype, Tensor, TensorData};
pub use wav::{
    foa_from_audio, foa_wav_bytes, read_foa, read_mono, read_wav, read_wav_bytes, wav_bytes, write_foa, WavAudio,
    WavFormat, DEFAULT_SAMPLE_RATE,
};
