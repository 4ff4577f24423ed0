//! Serde adapters for the on-disk formats. A complex number is always a
//! two-entry array `[re, im]`; these modules plug into `#[serde(with)]`
//! on fields holding one complex value, a fixed triple, or a vector.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::hermitian::C64;

pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, ser: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(de)?;
        Ok(C64::new(re, im))
    }
}

pub mod complex_array {
    use super::*;

    pub fn serialize<S: Serializer>(zs: &[C64; 3], ser: S) -> Result<S::Ok, S::Error> {
        zs.map(|z| [z.re, z.im]).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<[C64; 3], D::Error> {
        let raw = <[[f64; 2]; 3]>::deserialize(de)?;
        Ok(raw.map(|[re, im]| C64::new(re, im)))
    }
}

pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(zs: &Vec<C64>, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(zs.iter().map(|z| [z.re, z.im]))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<C64>, D::Error> {
        let raw = <Vec<[f64; 2]>>::deserialize(de)?;
        Ok(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}
