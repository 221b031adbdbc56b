//! 21-point Gauss–Kronrod rule with the embedded 10-point Gauss rule.

#![allow(clippy::excessive_precision)]

use crate::scalar::Real;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_868_944,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One application of the rule on a panel.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PanelEstimate<T> {
    pub value: T,
    pub error: T,
}

/// Applies the rule on `[a, b]`. Returns the offending abscissa if the
/// integrand is not finite at a node.
pub(crate) fn gauss_kronrod_21<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
) -> Result<PanelEstimate<T>, T> {
    let half = T::c(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);

    let eval = |x: T| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(x)
        }
    };

    let fc = eval(center)?;
    let mut kronrod = fc * T::c(WGK[10]);
    let mut gauss = T::zero();
    let mut abs_sum = kronrod.abs();
    let mut samples = [(T::zero(), T::zero()); 10];

    for j in 0..10 {
        let dx = half_len * T::c(XGK[j]);
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        samples[j] = (f1, f2);
        let w = T::c(WGK[j]);
        kronrod += w * (f1 + f2);
        abs_sum += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += T::c(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = kronrod * half;
    let mut asc = T::c(WGK[10]) * (fc - mean).abs();
    for (j, &(f1, f2)) in samples.iter().enumerate() {
        asc += T::c(WGK[j]) * ((f1 - mean).abs() + (f2 - mean).abs());
    }

    let scale = half_len.abs();
    let value = kronrod * half_len;
    let abs_value = abs_sum * scale;
    let asc = asc * scale;
    let raw = ((kronrod - gauss) * half_len).abs();
    Ok(PanelEstimate {
        value,
        error: rescale_error(raw, abs_value, asc),
    })
}

fn rescale_error<T: Real>(raw: T, abs_value: T, asc: T) -> T {
    let mut err = raw;
    if asc != T::zero() && err != T::zero() {
        let ratio = (T::c(200.0) * err / asc).powf(T::c(1.5));
        err = if ratio < T::one() { asc * ratio } else { asc };
    }
    let floor = T::c(50.0) * T::epsilon() * abs_value;
    if abs_value > T::min_positive_value() / (T::c(50.0) * T::epsilon()) && floor > err {
        err = floor;
    }
    err
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_high_degree_polynomials() {
        // Kronrod is exact to degree 31, the embedded Gauss rule to 19.
        let r = gauss_kronrod_21(&|x: f64| 32.0 * x.powi(31), 0.0, 1.0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        let r = gauss_kronrod_21(&|x: f64| 20.0 * x.powi(19), 0.0, 1.0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        assert!(r.error < 1e-13);
    }

    #[test]
    fn reports_non_finite_node() {
        let r = gauss_kronrod_21(
            &|x: f64| if x > 0.5 { f64::INFINITY } else { 1.0 },
            0.0,
            1.0,
        );
        assert!(r.is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let r = gauss_kronrod_21(&|x: f32| x.exp(), 0.0, 1.0).unwrap();
        assert!((r.value - (1f32.exp() - 1.0)).abs() < 1e-6);
    }
}
