//! Water segmentation of a single frame: boxcar speckle filter, fixed
//! threshold, then removal of small water components.

mod boxcar;
mod components;

pub use boxcar::{boxcar_filter, window_extent, DenoisedPlane};
pub use components::{label_components, remove_small_water_components, ComponentLabeling};


use rayon::prelude::*;

use crate::error::Result;
use crate::params::DetectorParams;
use crate::raster::{extract_channel, BinaryMap, Class, Plane, SarFrame};
use crate::scalar::Backscatter;

/// Ground where the value is strictly above `threshold`, water otherwise.
pub fn threshold_segment<T: Backscatter>(plane: &Plane<T>, threshold: T) -> BinaryMap {
    let values = plane
        .as_slice()
        .par_iter()
        .map(|&v| if v > threshold { Class::Ground } else { Class::Water })
        .collect();
    BinaryMap::new(plane.width(), plane.height(), values).expect("same dimensions as input plane")
}

/// Full per-frame segmentation on the configured channel.
pub fn segment_water<T: Backscatter>(frame: &SarFrame<T>, params: &DetectorParams) -> Result<BinaryMap> {
    params.validate()?;
    let plane = extract_channel(frame, params.channel)?;
    let denoised = boxcar_filter(plane, params.kernel_size)?;
    let binary = threshold_segment(&denoised, T::from_f64_lossy(params.threshold));
    Ok(remove_small_water_components(&binary, params.num_components))
}
