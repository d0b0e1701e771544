fn main() {
    println!("advattrib");
}
