function onStart() {
  return "started";
}
function onStop() {
  return "stopped";
}
function fire(handlers, name) {
  const handler = handlers[name];
  return handler();
}
const table = { start: onStart, stop: onStop };
console.log(fire(table, "start"));
console.log(fire(table, "stop"));
