// Inserts a bait node and reports a blocker when it disappears.
(function () {
  var bait = document.createElement("div");
  bait.id = "bait";
  bait.className = "ad-banner";
  document.body.appendChild(bait);

  function abDetected(){return !document.getElementById("bait");}

  window.setTimeout(function () {
    if (abDetected()) {
      document.body.className += " adblock-on";
    }
  }, 100);
})();
