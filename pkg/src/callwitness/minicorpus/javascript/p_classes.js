class Counter {
  constructor(start) {
    this.value = start;
  }
  bump(n) {
    this.value = this.value + n;
    return this.value;
  }
  read() {
    return this.value;
  }
}
function drive() {
  const c = new Counter(10);
  c.bump(1);
  c.bump(2);
  return c.read();
}
console.log(drive());
