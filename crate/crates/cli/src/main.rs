fn main() {
    println!("parahoric");
}
