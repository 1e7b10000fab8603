//! Unstable cylinder weights of the measure of maximal entropy on the golden mean shift.

use solenoid_dynamics::mme::{entropy_sft, parse_word, rs_unstable_weight, weights_csv, TransitionMatrix};

fn main() -> solenoid_dynamics::Result<()> {
    let perron = entropy_sft(&TransitionMatrix::golden_mean())?;
    println!("h = {:.12}, right vector {:?}", perron.h, perron.right_vec);
    let w = |s: &str| rs_unstable_weight(&perron, &parse_word(s, 2)?);
    println!("weight(0) = {:.12}", w("0")?);
    println!("weight(00) + weight(01) = {:.12}", w("00")? + w("01")?);
    print!("{}", weights_csv(&perron, 3)?);
    Ok(())
}
