// Measures how long an ad frame takes to load; blockers answer too fast.
function timingProbe(done) {
  var t0 = performance.now();
  var frame = document.createElement("iframe");
  frame.src = "/ads/frame.html";
  frame.onload = function () {
    var dt = performance.now() - t0;
    done(false);
  };
  document.body.appendChild(frame);
}

timingProbe(function (blocked) {
  if (blocked) { document.cookie = "ab=1; path=/"; }
});
