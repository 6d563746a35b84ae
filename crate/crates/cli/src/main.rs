fn main() {
    let spec = chaincode::chain::standard_chain(4, 1.0).expect("valid chain");
    let f = chaincode::chain::mirror_fidelities(&spec).expect("propagator");
    println!("{f:?}");
}
