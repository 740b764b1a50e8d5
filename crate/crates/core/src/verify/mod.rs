//! Pointwise inequality checks and the summation budget.

mod budget;
mod cert;
mod margins;

pub use budget::{budget_from_ladder, paper_ladder, theorem_budget, BigLog, BudgetReport, BudgetTerm, LadderRung};
pub use cert::{ln_exp_tail, ln_factorial, taylor_certificate, taylor_remainder_cert, TaylorCertificate};
pub use margins::{
    fmt_f64, lemma1_check, lemma1_suite, prop1_check, prop1_decompose, prop1_suite, random_line_sites,
    write_margin_csv, young_scalar_margin, CaseId, Decomposition, MarginReport, ROUNDING_SLACK,
};
