//! Explicit data: the bubble train, strict-inclusion delta trains, the
//! moving bumps and random divergence-free families.

mod bubble;
mod moving;
mod random;
mod strict;

pub use bubble::{bubble_blowup, gen_bubble_train, BubbleBlowup, BubbleTrainSpec};
pub use moving::{gen_moving_bump, gen_moving_bump_exact, MovingBump};
pub use random::{gen_divfree_random, taylor_green};
pub use strict::{gen_delta_train, gen_strict_inclusion, snap_width, DeltaTrain, InclusionCase};
