//! Reference solvers used to verify reductions: nonnegative and signed
//! lasso by coordinate descent, the constrained gauge LP, a brute-force
//! oracle for small `l_q^q` problems, and K-fold cross-validation.

mod cd;
mod cv;
mod lp;
mod lqq;

pub use cd::{
    cd_solve, lasso_symmetrized, nn_lasso_cd, Design, SolveResult, CD_CHANGE_TOL, CD_MAX_SWEEPS,
    KKT_TOL,
};
pub use cv::{eta_grid, kfold_cv, lasso_path, CvResult, CV_GRID_DECADES};
pub use lp::constrained_gauge;
pub use lqq::{lqq_support_oracle, LQQ_MAX_COLS};
