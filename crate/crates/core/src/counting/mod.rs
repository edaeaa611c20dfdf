pub mod quadruples;
pub mod matrices;
pub mod reduce;

pub use quadruples::{
    enumerate_a, enumerate_a_naive, enumerate_a_square, is_square_quad, quadruple_bound_check, plain_bound, square_bound,
    BoundReport, CountingInstance, Quad, Which, DEFAULT_BOX_CAP,
};
pub use matrices::{
    enumerate_r_n_matrices, enumerate_r_n_matrices_naive, geometric_sum, kernel_majorant, m0_shape,
    matrix_count_split, Matrix, MatrixCountInstance, MatrixSplit,
};
pub use reduce::{count_admissible_a, valuation_inequality_holds, CongruenceReductionInstance, ReductionReport};
