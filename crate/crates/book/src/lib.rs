//! Runs the code in the guide under `book/` as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/data.md")]
pub mod data {}
#[doc = include_str!("../../../book/src/glc-l.md")]
pub mod glc_l {}
#[doc = include_str!("../../../book/src/views.md")]
pub mod views {}
#[doc = include_str!("../../../book/src/kernels.md")]
pub mod kernels {}
#[doc = include_str!("../../../book/src/hyperblocks.md")]
pub mod hyperblocks {}
#[doc = include_str!("../../../book/src/separation.md")]
pub mod separation {}
#[doc = include_str!("../../../book/src/validation.md")]
pub mod validation {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/service.md")]
pub mod service {}
