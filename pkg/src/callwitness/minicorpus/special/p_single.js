function fetchValue() {
  return compute();
}
function compute() {
  return 2;
}
console.log(fetchValue());
