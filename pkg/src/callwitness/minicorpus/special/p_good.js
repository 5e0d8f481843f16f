function first() {
  return second() + 1;
}
function second() {
  return third() * 2;
}
function third() {
  return 4;
}
console.log(first());
