//! Matrices of spanning rooted forests of weighted digraphs.
//!
//! The crate computes the forest matrices `Q_k` and their normalized forms
//! by linear algebra, cross-checks them against exhaustive enumeration, and
//! reads structure off them: reachability, source knots, accessibility
//! measures, Cesàro limits of Markov chains and ranking scores.
//!
//! Vertices are 0-based in the API and 1-based in text input and JSON.
//!
//! ```
//! use forestmat::{forest_stack, load_digraph};
//!
//! let g = load_digraph("3\n1 2\n2 3").unwrap();
//! let stack = forest_stack(&g).unwrap();
//! assert_eq!(stack.forest_dimension(), 1);
//! assert_eq!(stack.sigmas(), vec![1.0, 2.0, 1.0]);
//! ```

pub mod accessibility;
pub mod corpus;
pub mod digraph;
pub mod error;
pub mod exact;
pub mod forest;
pub mod laplacian;
pub mod markov;
pub mod matrix;
pub mod oracle;
pub mod ranking;
pub mod structure;
pub mod verify;

pub use accessibility::{
    check_addition_to_monotonicity, check_condition, check_matrix_condition, convexity_path,
    in_accessibility, out_accessibility, perturbation_schedule, Condition, ConditionReport,
    Direction, MeasureSpec, Mode, Perturbation, ProximityMatrix, Tau, Variant, Verdict, Witness,
};
pub use digraph::{
    load_digraph, mediates, reachability_bfs, reverse, source_knots, standard_numeration,
    strong_components, Arc, Condensation, Digraph, MediationTable, SourceKnotSet,
};
pub use error::{Error, Result};
pub use exact::{exact_forest_recurrence, ExactForestStack, RationalMatrix};
pub use forest::{
    dense_forest_matrix, forest_digraph_laplacians, forest_dimension, forest_recurrence,
    forest_stack, in_forest_stack, jbar, parametric_matrices, qk_via_powers, ForestMatrixStack,
    MaxForestMatrix, ParametricForestMatrix,
};
pub use laplacian::{
    column_laplacian, degrees, row_laplacian, DegreeKind, DegreeVector, LaplacianMatrix,
    Orientation,
};
pub use markov::{
    cesaro_limit, default_alpha, dissemination_estimate, dissemination_target,
    inverse_corresponding_chain, max_alpha, uniform_start_distribution, uniform_start_from_cesaro,
    verify_tree_theorem, CesaroLimit, DisseminationEstimate, MarkovChain, TreeTheoremCheck,
};
pub use matrix::{BinaryMatrix, Matrix};
pub use oracle::{
    enumerate_in_forests, enumerate_out_forests, extend_path_to_forest, oracle_qk, oracle_total,
    ForestSet, SpanningForest,
};
pub use ranking::{
    daniels_scores_strong, generalized_borda, mean_score, rank_order, score_basis, score_basis_at,
    symmetrized, BordaDegrees, ScoreBasis, ScoreMethod, ScoreVector,
};
pub use structure::{
    approx_top_reachability, knots_from_jbar, reachability_from_jtau,
    reachability_from_top_layers, top_reachability, TopReachabilityMatrix,
};
pub use verify::{verify_digraph, CheckStatus, IdentityCheck, VerificationReport};
