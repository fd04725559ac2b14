// Loads a well-known ad script and flags a blocker when it fails.
var adblock = false;
var probe = document.createElement("script");
probe.src = "https://securepubads.g.doubleclick.net/tag/js/gpt.js";
probe.onerror = function () { window.adblock = false; };
document.head.appendChild(probe);

setTimeout(function () {
  if (window.adblock) {
    location.href = "/adblock-notice";
  }
}, 1500);
