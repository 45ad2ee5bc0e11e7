//! AFE specifications, truncated sums, direct remainders and the explicit
//! product-remainder assembly.

pub mod divisor;
pub mod power;
pub mod roots;
pub mod spec;
pub mod theorem1;
pub mod theorem2;
pub mod trunc;

pub use divisor::{divisor_delta, divisor_summatory, divisor_sweep, DivisorDelta, DivisorSweep};
pub use power::{CoeffSource, PowerTable};
pub use roots::{principal_branches, root_checks, root_square_check, RootBranches, RootCheck, RootPath};
pub use spec::{direct_remainder, truncated_sum, AfeModel, AfeSpec, PointAfe, Side};
pub use theorem1::{
    balanced_point, corollary1_square, fe_dual_parts, product_remainder, reflected_point, theorem1_assemble,
    theorem1_balanced, theorem1_points, RemainderBreakdown, SquareRemainder, CSV_HEADER,
};
pub use theorem2::{theorem2_check, Theorem2Report};
pub use trunc::{TruncBase, TruncPoint};
