class Shape {
  constructor(name) {
    this.name = name;
  }
  describe() {
    return this.name + ":" + this.area();
  }
}
class Square extends Shape {
  constructor(side) {
    super("square");
    this.side = side;
  }
  area() {
    return this.side * this.side;
  }
}
function build(side) {
  return new Square(side);
}
console.log(build(3).describe());
