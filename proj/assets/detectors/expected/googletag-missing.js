// Expects the ad library global to exist once the page has loaded.
function showWall() {}

window.addEventListener("load", function () {
  if (typeof googletag === "undefined" || !googletag.apiReady) {
    showWall();
  }
});
