// Expects the ad library global to exist once the page has loaded.
function showWall() {
  var wall = document.createElement("div");
  wall.className = "wall";
  wall.textContent = "Please disable your ad blocker";
  document.body.appendChild(wall);
  document.body.style.overflow = "hidden";
}

window.addEventListener("load", function () {
  if (typeof googletag === "undefined" || !googletag.apiReady) {
    showWall();
  }
});
