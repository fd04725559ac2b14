// Times a tracking pixel from an ad host; an instant error means a blocker.
function reportAdblock(ms) {}

(function () {
  var start = Date.now();
  var px = new Image();
  px.onerror = function () {
    var elapsed = Date.now() - start;
    if (elapsed < 20) reportAdblock(elapsed);
  };
  px.src = "https://ad.doubleclick.net/pixel.gif?r=" + Math.random();
})();
