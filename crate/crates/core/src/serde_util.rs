//! Serialization helpers for values without a suitable serde representation.

pub mod complex {
    use num_complex::Complex64;
    use serde::ser::SerializeStruct;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Complex", 2)?;
        st.serialize_field("re", &z.re)?;
        st.serialize_field("im", &z.im)?;
        st.end()
    }
}

pub mod complex_vec {
    use num_complex::Complex64;
    use serde::ser::SerializeSeq;
    use serde::{Serialize, Serializer};

    #[derive(Serialize)]
    struct Pair {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for z in v {
            seq.serialize_element(&Pair { re: z.re, im: z.im })?;
        }
        seq.end()
    }
}

/// Exact rationals as `{"rational": "num/den", "decimal": value}`.
pub mod rational {
    use num_rational::Rational64;
    use serde::ser::SerializeStruct;
    use serde::Serializer;

    pub fn to_f64(r: &Rational64) -> f64 {
        *r.numer() as f64 / *r.denom() as f64
    }

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Rational", 2)?;
        st.serialize_field("rational", &format!("{}/{}", r.numer(), r.denom()))?;
        st.serialize_field("decimal", &to_f64(r))?;
        st.end()
    }
}
