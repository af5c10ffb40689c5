//! Parameter-imaging reconstruction of one readout position.

use num_complex::Complex64;

use super::admm::{self, LiftTerm, XUpdate};
use super::{peak, AdmmConfig, AdmmOutcome};
use crate::error::{ensure, Result};
use crate::hankel::HankelConfig;
use crate::normal::ParamNormal;
use crate::sampling::SamplingMask;
use crate::tensor::ComplexTensor;

/// Reconstructs the phase-encoding/echo plane `y_m` (`N×L×J`, k-space along
/// phase encoding, image domain along readout) at one readout position.
///
/// Phase-encoding lines are lifted with weighting and thresholded at `1/β`;
/// echo trains are lifted without weighting and thresholded at `λ2/β`.
pub fn shlr_param_reconstruct_slice(
    y_m: &ComplexTensor,
    mask: &SamplingMask,
    hcfg: &HankelConfig,
    acfg: &AdmmConfig,
) -> Result<AdmmOutcome> {
    acfg.validate()?;
    let dims = y_m.dims3()?;
    ensure!(
        y_m.is_finite(),
        InvalidArgument,
        "k-space contains non-finite values"
    );
    let hcfg = HankelConfig {
        virtual_coil: acfg.enable_vc,
        ..hcfg.clone()
    };
    let op = ParamNormal::new(dims, mask, &hcfg, acfg.param_pencil, acfg.lambda, acfg.beta)?;

    let mut data_rhs = op.data_rhs(y_m)?;
    let mut x0 = data_rhs.clone();
    x0.scale(Complex64::new(1.0 / acfg.lambda, 0.0));
    let scale = if acfg.normalize { peak(&x0) } else { 1.0 };
    data_rhs.scale(Complex64::new(1.0 / scale, 0.0));
    x0.scale(Complex64::new(1.0 / scale, 0.0));

    let normal = |x: &ComplexTensor| op.apply(x).expect("dims checked");
    let direct = |x: &ComplexTensor| op.direct_solve(x);
    let xu = XUpdate {
        normal: &normal,
        direct: Some(&direct),
        data_rhs,
    };
    let terms = [
        LiftTerm {
            op: &op.param,
            threshold: acfg.lambda2 / acfg.beta,
        },
        LiftTerm {
            op: &op.pe,
            threshold: 1.0 / acfg.beta,
        },
    ];
    let mut out = admm::run(&xu, &terms, x0, acfg)?;
    out.x.scale(Complex64::new(scale, 0.0));
    Ok(out)
}
