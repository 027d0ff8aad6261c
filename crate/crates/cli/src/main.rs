fn main() {
    println!("potlab");
}
