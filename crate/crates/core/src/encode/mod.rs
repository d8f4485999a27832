//! Scene and map encodings for learned predictors: material rasters, the
//! free-space channel, bicubic resampling and normalized feature tensors.

pub mod raster;
pub mod resample;
pub mod tensor;

pub use raster::{fspl_map, rasterize_property, rasterize_property_with_dims, ChannelTag, Property, Raster};
pub use resample::{downsample_box, resize_bicubic, upsample_nearest};
pub use tensor::{
    assemble_stage1, assemble_stage2, prediction_to_grid, target_resize, Bounds, EncodeBounds, Tensor,
};

/// Material raster width, pixels.
pub const RASTER_WIDTH: usize = 1738;
/// Material raster height, pixels.
pub const RASTER_HEIGHT: usize = 997;
/// Side of the model input tensors.
pub const TENSOR_SIDE: usize = 256;
/// Side of the model output.
pub const PREDICTION_SIDE: usize = 128;
