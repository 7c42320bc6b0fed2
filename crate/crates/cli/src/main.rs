fn main() {
    println!("tenkit");
}
